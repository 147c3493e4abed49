#ifndef WEAKINFO_PARALLEL_HPP
#define WEAKINFO_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace weakinfo {

/// Number of worker threads to use when the caller passes 0 ("default").
inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/**
 * Runs fn(i) for i in [0, count) across a pool of threads.
 *
 * Work is claimed by index from a shared counter, so the partition of indices
 * to threads varies; results must be written to per-index slots (never
 * accumulated in claim order) to keep outputs independent of thread count.
 * The first exception thrown by any worker is rethrown on the caller.
 */
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    const unsigned workers = resolve_threads(threads);
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::mutex claim_mutex;
    std::size_t next = 0;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lock(claim_mutex);
                if (next >= count) return;
                i = next++;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace weakinfo

#endif
