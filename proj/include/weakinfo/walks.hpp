#ifndef WEAKINFO_WALKS_HPP
#define WEAKINFO_WALKS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "weakinfo/errors.hpp"
#include "weakinfo/parallel.hpp"
#include "weakinfo/rational.hpp"
#include "weakinfo/rng.hpp"

namespace weakinfo {

enum class WalkKind { Binomial, Bernoulli01, Trinomial, Multinomial };

/**
 * A scaled random walk endpoint Z = (X_1 + ... + X_n) / (sigma sqrt(n)),
 * where the step law depends on the kind:
 *   binomial     steps +-1 with P(+1) = p
 *   bernoulli01  steps in {0, 1} with P(1) = p
 *   trinomial    steps in {-1, 0, +1} decomposed into two Bernoulli
 *                components with success probabilities p and q; each
 *                component is normalized by its own standard deviation
 *   multinomial  level-N walk built by recursive doubling: 2^{N-2}
 *                independent Bernoulli components per step, each normalized
 *                by its own standard deviation
 * sigma = 0 requests the default scaling (the centered step standard
 * deviation) for the single-component kinds; multi-component kinds always
 * use per-component scaling and reject an explicit sigma.
 */
struct WalkSpec {
    WalkKind kind = WalkKind::Binomial;
    int steps = 1;
    double p = 0.5;
    double q = 0.5;
    int level = 3;                       // multinomial only, N >= 3
    std::vector<double> probabilities;   // multinomial component probabilities
    double sigma = 0;                    // 0 = default scaling
};

inline std::string walk_kind_name(const WalkSpec& spec) {
    switch (spec.kind) {
        case WalkKind::Binomial: return "binomial";
        case WalkKind::Bernoulli01: return "bernoulli01";
        case WalkKind::Trinomial: return "trinomial";
        case WalkKind::Multinomial: return "multinomial:" + std::to_string(spec.level);
    }
    throw ValidationError("unknown walk kind");
}

namespace detail {

inline void check_probability(double p, const char* label, bool allow_one) {
    const double hi = allow_one ? 1.0 : std::nextafter(1.0, 0.0);
    if (!(p > 0) || p > hi)
        throw ValidationError(std::string(label) + " must lie in (0, 1" +
                              (allow_one ? "]" : ")"));
}

/// Component Bernoulli probabilities and their normalizing deviations.
struct WalkComponents {
    std::vector<double> probabilities;
    std::vector<double> sigmas;       // per-component scaling
    double value_scale = 1;           // maps Bernoulli totals to step values
    bool degenerate = false;          // some component has zero variance
};

inline WalkComponents resolve_components(const WalkSpec& spec) {
    WalkComponents out;
    switch (spec.kind) {
        case WalkKind::Binomial: {
            check_probability(spec.p, "p", true);
            const double step_sd = 2.0 * std::sqrt(spec.p * (1.0 - spec.p));
            out.degenerate = !(step_sd > 0);
            const double sigma = spec.sigma > 0 ? spec.sigma : step_sd;
            if (!(sigma > 0))
                throw DegenerateVariance(
                    "binomial walk with p = 1 has zero step variance; provide sigma explicitly");
            out.probabilities = {spec.p};
            out.sigmas = {sigma};
            out.value_scale = 2.0; // step = 2 B - 1
            return out;
        }
        case WalkKind::Bernoulli01: {
            check_probability(spec.p, "p", true);
            const double step_sd = std::sqrt(spec.p * (1.0 - spec.p));
            out.degenerate = !(step_sd > 0);
            const double sigma = spec.sigma > 0 ? spec.sigma : step_sd;
            if (!(sigma > 0))
                throw DegenerateVariance(
                    "bernoulli01 walk with p = 1 has zero step variance; provide sigma explicitly");
            out.probabilities = {spec.p};
            out.sigmas = {sigma};
            out.value_scale = 1.0; // step = B
            return out;
        }
        case WalkKind::Trinomial: {
            if (spec.sigma > 0)
                throw ConfigError("trinomial walks use per-component scaling; sigma is fixed");
            check_probability(spec.p, "p", false);
            check_probability(spec.q, "q", false);
            out.probabilities = {spec.p, spec.q};
            out.sigmas = {std::sqrt(spec.p * (1.0 - spec.p)), std::sqrt(spec.q * (1.0 - spec.q))};
            out.value_scale = 1.0; // step = B1 + B2 - 1
            return out;
        }
        case WalkKind::Multinomial: {
            if (spec.sigma > 0)
                throw ConfigError("multinomial walks use per-component scaling; sigma is fixed");
            if (spec.level < 3) throw ValidationError("multinomial level must be >= 3");
            if (spec.level > 12) throw ValidationError("multinomial level above 12 is not supported");
            const std::size_t components = std::size_t{1} << (spec.level - 2);
            if (spec.probabilities.size() != components)
                throw ValidationError("multinomial level " + std::to_string(spec.level) +
                                      " needs " + std::to_string(components) +
                                      " component probabilities, got " +
                                      std::to_string(spec.probabilities.size()));
            out.probabilities = spec.probabilities;
            out.sigmas.reserve(components);
            for (double p : spec.probabilities) {
                check_probability(p, "component probability", false);
                out.sigmas.push_back(std::sqrt(p * (1.0 - p)));
            }
            out.value_scale = 1.0;
            return out;
        }
    }
    throw ValidationError("unknown walk kind");
}

/// Exact Binomial(n, p) sampling table: cumulative probabilities of 0..n.
inline std::vector<double> binomial_cdf_table(int n, double p) {
    std::vector<double> cdf(static_cast<std::size_t>(n) + 1);
    const double log_p = std::log(p);
    const double log_1p = p < 1 ? std::log1p(-p) : -std::numeric_limits<double>::infinity();
    double running = 0;
    for (int j = 0; j <= n; ++j) {
        double log_pmf;
        if (p >= 1) {
            log_pmf = j == n ? 0 : -std::numeric_limits<double>::infinity();
        } else {
            log_pmf = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) +
                      j * log_p + (n - j) * log_1p;
        }
        running += std::exp(log_pmf);
        cdf[static_cast<std::size_t>(j)] = running;
    }
    cdf.back() = 1.0; // absorb rounding so sampling can never fall off the table
    return cdf;
}

inline int sample_from_cdf(const std::vector<double>& cdf, double u) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                     static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

} // namespace detail

struct EndpointSample {
    std::vector<double> z;
    bool degenerate = false;
    double mean = 0;
    double variance = 0; // unbiased (divides by count - 1)
};

struct LimitSpec {
    double drift = 0;        // per-step mean of the unscaled walk
    double endpoint_mean = 0;
    double endpoint_sd = 1;
};

/// The Gaussian limit the scaled endpoint law approaches (exact mean for
/// finite n; the variance is the n -> infinity value).
inline LimitSpec limit_spec(const WalkSpec& spec) {
    const detail::WalkComponents components = detail::resolve_components(spec);
    const double n = static_cast<double>(spec.steps);
    LimitSpec limit;

    // Per-step mean of the unscaled walk: binomial steps are 2B - 1,
    // bernoulli01 steps are B, and the component decompositions sum their
    // Bernoulli means and subtract half a unit per component.
    double drift = 0;
    for (double p : components.probabilities) drift += components.value_scale * p;
    if (spec.kind == WalkKind::Binomial || spec.kind == WalkKind::Trinomial) drift -= 1.0;
    if (spec.kind == WalkKind::Multinomial)
        drift -= static_cast<double>(components.probabilities.size()) / 2.0;

    switch (spec.kind) {
        case WalkKind::Binomial: {
            const double sigma = components.sigmas[0];
            limit.endpoint_mean = (2.0 * spec.p - 1.0) * n / (sigma * std::sqrt(n));
            limit.endpoint_sd = std::sqrt(4.0 * spec.p * (1.0 - spec.p)) / sigma;
            break;
        }
        case WalkKind::Bernoulli01: {
            const double sigma = components.sigmas[0];
            limit.endpoint_mean = spec.p * n / (sigma * std::sqrt(n));
            limit.endpoint_sd = std::sqrt(spec.p * (1.0 - spec.p)) / sigma;
            break;
        }
        case WalkKind::Trinomial:
        case WalkKind::Multinomial: {
            double m = 0;
            for (std::size_t i = 0; i < components.probabilities.size(); ++i)
                m += (components.probabilities[i] - 0.5) / components.sigmas[i];
            limit.endpoint_mean = std::sqrt(n) * m;
            limit.endpoint_sd = std::sqrt(static_cast<double>(components.probabilities.size()));
            break;
        }
    }
    limit.drift = drift;
    return limit;
}

/**
 * Draws `samples` independent copies of the scaled endpoint. Sampling is
 * exact (inverse transform on the full Binomial(n, p) cumulative table per
 * component), deterministic in (seed), and independent of the thread count:
 * samples are produced in fixed batches of 4096, each batch on its own
 * derived stream.
 */
inline EndpointSample simulate_endpoint(const WalkSpec& spec, std::size_t samples,
                                        std::uint64_t seed, unsigned threads = 0) {
    if (spec.steps < 1) throw ValidationError("walk needs at least one step");
    if (samples == 0) throw ValidationError("sample count must be positive");
    const detail::WalkComponents components = detail::resolve_components(spec);
    const int n = spec.steps;
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    std::vector<std::vector<double>> tables;
    tables.reserve(components.probabilities.size());
    for (double p : components.probabilities)
        tables.push_back(detail::binomial_cdf_table(n, p));

    EndpointSample out;
    out.degenerate = components.degenerate;
    out.z.resize(samples);

    constexpr std::size_t kBatch = 4096;
    const std::size_t batches = (samples + kBatch - 1) / kBatch;
    const unsigned thread_count = resolve_threads(threads);

    const bool single_component = components.probabilities.size() == 1;
    parallel_for(batches, thread_count, [&](std::size_t batch) {
        Rng rng(seed, batch);
        const std::size_t begin = batch * kBatch;
        const std::size_t end = std::min(begin + kBatch, samples);
        for (std::size_t s = begin; s < end; ++s) {
            double z = 0;
            for (std::size_t c = 0; c < tables.size(); ++c) {
                const int successes = detail::sample_from_cdf(tables[c], rng.uniform01());
                double centered;
                if (single_component && spec.kind == WalkKind::Binomial) {
                    centered = 2.0 * successes - n; // walk total in +-1 steps
                } else if (single_component) {
                    centered = successes;           // bernoulli01 total
                } else {
                    centered = successes - 0.5 * n; // component centered at n/2
                }
                z += centered / components.sigmas[c];
            }
            out.z[s] = z / sqrt_n;
        }
    });

    double mean = 0;
    for (double v : out.z) mean += v;
    mean /= static_cast<double>(samples);
    double ss = 0;
    for (double v : out.z) ss += (v - mean) * (v - mean);
    out.mean = mean;
    out.variance = samples > 1 ? ss / static_cast<double>(samples - 1) : 0.0;
    return out;
}

/// Standard normal cumulative distribution function.
inline double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

/**
 * Kolmogorov-Smirnov distance between the sample and N(mean, sd^2):
 * sup over x of |F_empirical(x) - F(x)|, evaluated tie-correctly at the
 * sorted sample points from both sides.
 */
inline double ks_distance(std::vector<double> samples, double mean, double sd) {
    if (samples.empty()) throw ValidationError("ks_distance needs samples");
    if (!(sd > 0)) throw DegenerateVariance("ks_distance needs a nondegenerate limit");
    std::sort(samples.begin(), samples.end());
    const double count = static_cast<double>(samples.size());
    double d = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = normal_cdf((samples[i] - mean) / sd);
        d = std::max(d, (static_cast<double>(i) + 1.0) / count - f);
        d = std::max(d, f - static_cast<double>(i) / count);
    }
    return d;
}

inline double ks_distance(std::vector<double> samples, const LimitSpec& limit) {
    return ks_distance(std::move(samples), limit.endpoint_mean, limit.endpoint_sd);
}

/// Evenly spaced characteristic-function evaluation grid on [-5, 5].
inline std::vector<double> default_frequency_grid() {
    std::vector<double> grid(64);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = -5.0 + 10.0 * static_cast<double>(i) / (grid.size() - 1);
    return grid;
}

/**
 * Largest modulus gap between the empirical characteristic function and the
 * Gaussian characteristic function exp(i u mean - u^2 sd^2 / 2) over the
 * frequency grid.
 */
inline double char_fn_distance(const std::vector<double>& samples, double mean, double sd,
                               const std::vector<double>& frequencies = default_frequency_grid()) {
    if (samples.empty()) throw ValidationError("char_fn_distance needs samples");
    double gap = 0;
    for (double u : frequencies) {
        double re = 0, im = 0;
        for (double x : samples) {
            re += std::cos(u * x);
            im += std::sin(u * x);
        }
        const double count = static_cast<double>(samples.size());
        const std::complex<double> empirical(re / count, im / count);
        const std::complex<double> limit =
            std::exp(std::complex<double>(-u * u * sd * sd / 2.0, u * mean));
        gap = std::max(gap, std::abs(empirical - limit));
    }
    return gap;
}

inline double char_fn_distance(const std::vector<double>& samples, const LimitSpec& limit,
                               const std::vector<double>& frequencies = default_frequency_grid()) {
    return char_fn_distance(samples, limit.endpoint_mean, limit.endpoint_sd, frequencies);
}

/**
 * One trinomial step as a sum of two independent Bernoulli components minus
 * one: returns the probabilities of {+1, 0, -1} in that order. Exact in
 * rational arithmetic.
 */
template <typename S>
std::array<S, 3> trinomial_decomposition(const S& p, const S& q) {
    const S one(1);
    return {p * q, p * (one - q) + (one - p) * q, (one - p) * (one - q)};
}

/// The same three-point law computed by direct convolution over the four
/// Bernoulli outcome pairs; used to cross-check the closed decomposition.
template <typename S>
std::array<S, 3> bernoulli_convolution(const S& p, const S& q) {
    const S one(1);
    std::array<S, 3> law{S(0), S(0), S(0)};
    for (int b1 = 0; b1 <= 1; ++b1) {
        for (int b2 = 0; b2 <= 1; ++b2) {
            const S mass = (b1 ? p : one - p) * (b2 ? q : one - q);
            const int step = b1 + b2 - 1; // +1, 0, -1
            law[static_cast<std::size_t>(1 - step)] += mass;
        }
    }
    return law;
}

/// Gaussian reference draws for the same-size finite-sample KS baseline.
/// Uses a dedicated stream tag so diagnostics never share a stream with the
/// walk samples under the same seed.
inline std::vector<double> gaussian_reference_sample(double mean, double sd, std::size_t count,
                                                     std::uint64_t seed) {
    Rng rng(seed, 0x4E554C4Cull); // tag: reference stream
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = mean + sd * rng.gaussian();
    return out;
}

} // namespace weakinfo

#endif
