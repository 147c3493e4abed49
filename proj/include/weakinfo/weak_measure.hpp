#ifndef WEAKINFO_WEAK_MEASURE_HPP
#define WEAKINFO_WEAK_MEASURE_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "weakinfo/errors.hpp"
#include "weakinfo/lattice.hpp"
#include "weakinfo/parallel.hpp"
#include "weakinfo/rng.hpp"

namespace weakinfo {

/**
 * The minimal measure induced by a terminal anticipation: within each
 * terminal count class the conditional path law is uniform (all paths into a
 * class are equally likely under the i.i.d. reference measure), and the class
 * itself carries mass nu(class). Equivalently, the path weight is
 * nu(class(path)) / multiplicity(class(path)) and the density against the
 * reference measure is class-measurable: xi(class) = nu(class) / refY(class).
 */
template <typename S>
struct WeakInfoMeasure {
    MultinomialEconomy<S> economy;
    TerminalLaw<S> nu;
    PathMeasure<S> paths;
    std::vector<CountClass> terminal_classes;
    std::vector<S> xi;                    // nu(class) / risk-neutral class mass
    std::vector<ClassIndex> levels;       // class lookup for m = 0..n
    std::vector<std::vector<S>> marginals; // marginals[m][class idx at level m]
};

namespace detail {

/// Componentwise j >= i.
inline bool dominates(const CountClass& j, const CountClass& i) {
    for (std::size_t d = 0; d < i.size(); ++d) {
        if (j[d] < i[d]) return false;
    }
    return true;
}

inline CountClass minus(const CountClass& j, const CountClass& i) {
    CountClass d(j.size());
    for (std::size_t t = 0; t < j.size(); ++t) d[t] = j[t] - i[t];
    return d;
}

} // namespace detail

/**
 * Builds the minimal measure for nu on the economy's lattice: path weights,
 * the class density xi, and cached per-node marginals
 *   P[state i at m] = mult(i) * sum_{j >= i} mult(j - i) * nu(j) / mult(j),
 * where the multiplicities count paths within a class at the indicated level.
 */
template <typename S>
WeakInfoMeasure<S> minimal_measure(const MultinomialEconomy<S>& economy, const TerminalLaw<S>& nu,
                                   std::uint64_t cap = kDefaultPathCap) {
    if (nu.n != economy.n_periods || nu.k != economy.k())
        throw ClassMismatch("terminal law shape does not match the economy");

    WeakInfoMeasure<S> measure;
    measure.economy = economy;
    measure.nu = nu;

    const int n = economy.n_periods;
    const int k = economy.k();

    measure.levels.reserve(n + 1);
    for (int m = 0; m <= n; ++m) measure.levels.emplace_back(m, k);
    measure.terminal_classes = measure.levels[n].classes();

    // Class density against the reference measure.
    const auto ref_mass = risk_neutral_class_mass(economy);
    measure.xi.resize(ref_mass.size());
    for (std::size_t c = 0; c < ref_mass.size(); ++c) {
        measure.xi[c] = nu.mass[c] / ref_mass[c];
    }

    // Uniform-bridge path weights.
    check_path_cap(n, k, cap);
    std::vector<S> class_multiplicity(measure.terminal_classes.size());
    for (std::size_t c = 0; c < measure.terminal_classes.size(); ++c) {
        class_multiplicity[c] = multinomial_coefficient<S>(measure.terminal_classes[c]);
    }
    const PathTable table = enumerate_paths(economy, cap);
    measure.paths.n = n;
    measure.paths.k = k;
    measure.paths.weights.resize(table.paths);
    for (std::uint64_t p = 0; p < table.paths; ++p) {
        const std::uint32_t c = table.terminal_class_of_path[p];
        measure.paths.weights[p] = nu.mass[c] / class_multiplicity[c];
    }

    // Marginals by the closed form above.
    measure.marginals.resize(n + 1);
    for (int m = 0; m <= n; ++m) {
        const auto& states = measure.levels[m].classes();
        measure.marginals[m].assign(states.size(), S(0));
        for (std::size_t s = 0; s < states.size(); ++s) {
            S total = 0;
            for (std::size_t c = 0; c < measure.terminal_classes.size(); ++c) {
                const auto& j = measure.terminal_classes[c];
                if (!(nu.mass[c] > 0) || !detail::dominates(j, states[s])) continue;
                total += multinomial_coefficient<S>(detail::minus(j, states[s])) * nu.mass[c] /
                         class_multiplicity[c];
            }
            measure.marginals[m][s] = multinomial_coefficient<S>(states[s]) * total;
        }
    }
    return measure;
}

/**
 * Closed-form transition probability P[move x | state i at time m] under the
 * minimal measure:
 *
 *   sum_{j >= i + e_x} mult_{n-m-1}(j - i - e_x) nu(j) / mult_n(j)
 *   ---------------------------------------------------------------
 *   sum_{j >= i}       mult_{n-m}(j - i)         nu(j) / mult_n(j)
 *
 * The reference move probabilities cancel entirely, so the value is
 * independent of which valid risk-neutral vector the economy carries.
 */
template <typename S>
S transition_probability(const WeakInfoMeasure<S>& measure, int m, const CountClass& state,
                         int move) {
    const int n = measure.economy.n_periods;
    const int k = measure.economy.k();
    if (m < 0 || m >= n) throw ValidationError("transition time must satisfy 0 <= m < n");
    if (move < 0 || move >= k) throw ValidationError("move index out of range");
    const std::size_t idx = measure.levels[m].at(state);
    if (!(measure.marginals[m][idx] > 0)) {
        throw UnreachableState("state " + ClassIndex::format_class(state) + " at time " +
                               std::to_string(m) + " has zero probability");
    }

    CountClass advanced = state;
    ++advanced[move];

    S numerator = 0, denominator = 0;
    for (std::size_t c = 0; c < measure.terminal_classes.size(); ++c) {
        if (!(measure.nu.mass[c] > 0)) continue;
        const auto& j = measure.terminal_classes[c];
        if (!detail::dominates(j, state)) continue;
        const S contribution = measure.nu.mass[c] /
                               multinomial_coefficient<S>(measure.terminal_classes[c]);
        denominator += multinomial_coefficient<S>(detail::minus(j, state)) * contribution;
        if (detail::dominates(j, advanced)) {
            numerator += multinomial_coefficient<S>(detail::minus(j, advanced)) * contribution;
        }
    }
    return numerator / denominator;
}

struct MarkovReport {
    double max_deviation = 0;
    std::uint64_t histories_checked = 0;
};

/**
 * Exhaustive Markov check: for every time m, every positive-probability move
 * history, and every move, compares the history-conditional move probability
 * from the path weights with the count-class transition probability. The
 * maximum absolute deviation is 0 (up to arithmetic) exactly because the
 * conditional path law within a class is an exchangeable bridge.
 */
template <typename S>
MarkovReport markov_check(const WeakInfoMeasure<S>& measure) {
    const int n = measure.economy.n_periods;
    const int k = measure.economy.k();
    const auto& weights = measure.paths.weights;

    MarkovReport report;

    // prefix_mass[m] holds the total weight of each length-m move prefix,
    // indexed by the prefix's big-endian base-k code.
    std::vector<std::vector<S>> prefix_mass(n + 1);
    for (int m = 0; m <= n; ++m) {
        prefix_mass[m].assign(path_count_total(m, k), S(0));
    }
    const std::uint64_t paths = weights.size();
    for (std::uint64_t p = 0; p < paths; ++p) {
        if (!(weights[p] > 0)) continue;
        std::uint64_t code = p;
        std::uint64_t divisor = paths / k;
        std::uint64_t prefix = 0;
        prefix_mass[0][0] += weights[p];
        for (int m = 1; m <= n; ++m) {
            prefix = prefix * k + code / divisor;
            code %= divisor;
            divisor /= k;
            prefix_mass[m][prefix] += weights[p];
        }
    }

    for (int m = 0; m < n; ++m) {
        const std::uint64_t prefixes = path_count_total(m, k);
        for (std::uint64_t prefix = 0; prefix < prefixes; ++prefix) {
            const S& base = prefix_mass[m][prefix];
            if (!(base > 0)) continue;
            ++report.histories_checked;
            // Decode the prefix to its count class.
            CountClass state(k, 0);
            {
                std::uint64_t code = prefix;
                for (int i = 0; i < m; ++i) {
                    ++state[static_cast<int>(code % k)];
                    code /= k;
                }
            }
            for (int move = 0; move < k; ++move) {
                const S conditional = prefix_mass[m + 1][prefix * k + move] / base;
                const S closed = transition_probability(measure, m, state, move);
                const double deviation = std::abs(to_double(conditional - closed));
                if (deviation > report.max_deviation) report.max_deviation = deviation;
            }
        }
    }
    return report;
}

/// Convex test functions for the minimality check.
enum class ConvexPhi { Square, XLogX };

struct MinimalityReport {
    double min_gap = 0;       // min over trials of E[phi(dQ/dRef)] - E[phi(dMin/dRef)]
    double reference_value = 0; // E[phi(dMin/dRef)]
    int trials = 0;
};

namespace detail {

inline double phi_eval(ConvexPhi phi, double x) {
    switch (phi) {
        case ConvexPhi::Square:
            return x * x;
        case ConvexPhi::XLogX:
            return x > 0 ? x * std::log(x) : 0.0;
    }
    return 0.0;
}

} // namespace detail

/**
 * Samples `trials` measures Q that share nu's terminal pushforward but
 * redistribute mass within each terminal class (Dirichlet(1) redistribution:
 * normalized exponential deviates; in exact arithmetic, normalized random
 * positive integers), and verifies that the minimal measure minimizes
 * E_ref[phi(density)] over them. Returns the smallest sampled gap; a correct
 * construction never produces a gap below -1e-12.
 *
 * Trial streams are derived from (seed, trial index), so results do not
 * depend on the thread count.
 */
template <typename S>
MinimalityReport minimality_check(const MultinomialEconomy<S>& economy, const TerminalLaw<S>& nu,
                                  ConvexPhi phi, int trials, std::uint64_t seed,
                                  unsigned threads = 1, std::uint64_t cap = kDefaultPathCap) {
    if (!nu.equivalent) throw NotEquivalent("minimality check requires an equivalent terminal law");
    if (trials < 1) throw ValidationError("trials must be >= 1");
    if constexpr (detail::is_rational_v<S>) {
        if (phi == ConvexPhi::XLogX)
            throw ConfigError("phi = xlogx requires float arithmetic; use phi = square");
    }

    const WeakInfoMeasure<S> minimal = minimal_measure(economy, nu, cap);
    const PathMeasure<S> reference = risk_neutral_path_measure(economy, cap);
    const PathTable table = enumerate_paths(economy, cap);

    // Paths grouped by terminal class.
    std::vector<std::vector<std::uint64_t>> members(minimal.terminal_classes.size());
    for (std::uint64_t p = 0; p < table.paths; ++p) {
        members[table.terminal_class_of_path[p]].push_back(p);
    }

    auto divergence = [&](const std::vector<S>& path_weights) {
        if constexpr (detail::is_rational_v<S>) {
            S total = 0;
            for (std::uint64_t p = 0; p < table.paths; ++p) {
                const S density = path_weights[p] / reference.weights[p];
                total += reference.weights[p] * density * density;
            }
            return to_double(total);
        } else {
            double total = 0;
            for (std::uint64_t p = 0; p < table.paths; ++p) {
                total += to_double(reference.weights[p]) *
                         detail::phi_eval(phi, to_double(path_weights[p] / reference.weights[p]));
            }
            return total;
        }
    };

    MinimalityReport report;
    report.trials = trials;
    report.reference_value = divergence(minimal.paths.weights);

    std::vector<double> gaps(trials);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t trial) {
        Rng rng(seed, trial);
        std::vector<S> q(table.paths);
        for (std::size_t c = 0; c < members.size(); ++c) {
            const auto& group = members[c];
            if (group.size() == 1) {
                q[group[0]] = nu.mass[c];
                continue;
            }
            std::vector<S> raw(group.size());
            S total = 0;
            for (std::size_t i = 0; i < group.size(); ++i) {
                if constexpr (detail::is_rational_v<S>) {
                    raw[i] = S(1 + static_cast<long long>(rng.below(1u << 20)));
                } else {
                    raw[i] = rng.exponential() + 1e-300;
                }
                total += raw[i];
            }
            for (std::size_t i = 0; i < group.size(); ++i) {
                q[group[i]] = nu.mass[c] * raw[i] / total;
            }
        }
        gaps[trial] = divergence(q) - report.reference_value;
    });

    report.min_gap = gaps[0];
    for (double g : gaps) report.min_gap = std::min(report.min_gap, g);
    return report;
}

/// User-supplied convex phi variant (float arithmetic only).
inline MinimalityReport minimality_check(const MultinomialEconomy<double>& economy,
                                         const TerminalLaw<double>& nu,
                                         const std::function<double(double)>& phi, int trials,
                                         std::uint64_t seed, unsigned threads = 1,
                                         std::uint64_t cap = kDefaultPathCap) {
    if (!nu.equivalent) throw NotEquivalent("minimality check requires an equivalent terminal law");
    if (trials < 1) throw ValidationError("trials must be >= 1");

    const WeakInfoMeasure<double> minimal = minimal_measure(economy, nu, cap);
    const PathMeasure<double> reference = risk_neutral_path_measure(economy, cap);
    const PathTable table = enumerate_paths(economy, cap);

    std::vector<std::vector<std::uint64_t>> members(minimal.terminal_classes.size());
    for (std::uint64_t p = 0; p < table.paths; ++p) {
        members[table.terminal_class_of_path[p]].push_back(p);
    }
    auto divergence = [&](const std::vector<double>& path_weights) {
        double total = 0;
        for (std::uint64_t p = 0; p < table.paths; ++p) {
            total += reference.weights[p] * phi(path_weights[p] / reference.weights[p]);
        }
        return total;
    };

    MinimalityReport report;
    report.trials = trials;
    report.reference_value = divergence(minimal.paths.weights);

    std::vector<double> gaps(trials);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t trial) {
        Rng rng(seed, trial);
        std::vector<double> q(table.paths);
        for (std::size_t c = 0; c < members.size(); ++c) {
            const auto& group = members[c];
            double total = 0;
            std::vector<double> raw(group.size());
            for (std::size_t i = 0; i < group.size(); ++i) {
                raw[i] = rng.exponential() + 1e-300;
                total += raw[i];
            }
            for (std::size_t i = 0; i < group.size(); ++i) {
                q[group[i]] = nu.mass[c] * raw[i] / total;
            }
        }
        gaps[trial] = divergence(q) - report.reference_value;
    });

    report.min_gap = gaps[0];
    for (double g : gaps) report.min_gap = std::min(report.min_gap, g);
    return report;
}

} // namespace weakinfo

#endif
