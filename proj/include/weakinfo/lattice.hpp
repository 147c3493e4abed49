#ifndef WEAKINFO_LATTICE_HPP
#define WEAKINFO_LATTICE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "weakinfo/errors.hpp"
#include "weakinfo/rational.hpp"

namespace weakinfo {

/// Move-count state (j_1, ..., j_k): j_i moves of factor a_i so far.
/// The sum of the counts is the node's time index.
using CountClass = std::vector<int>;

/// Default budget for exhaustive path enumeration, in path-steps (k^n * n).
inline constexpr std::uint64_t kDefaultPathCap = 10'000'000;

namespace detail {

template <typename S>
constexpr bool is_rational_v = std::is_same_v<S, Rational>;

/// |a - b| <= tol in float mode; exact equality in rational mode.
template <typename S>
bool close(const S& a, const S& b, double tol) {
    if constexpr (is_rational_v<S>) {
        return a == b;
    } else {
        return std::abs(a - b) <= tol;
    }
}

} // namespace detail

/**
 * One-asset n-period lattice economy: k move factors a_1 > ... > a_k > 0, a
 * per-step risk-free rate r > -1, initial price s > 0, and a strictly
 * positive risk-neutral move vector satisfying sum(p_i a_i) = 1 + r.
 */
template <typename S>
struct MultinomialEconomy {
    int n_periods = 0;
    std::vector<S> factors;
    S rate{};
    S initial_price{};
    std::vector<S> risk_neutral;

    int k() const { return static_cast<int>(factors.size()); }
};

/**
 * Validates and assembles an economy.
 *
 * If risk_neutral is omitted, k must be 2 and the unique binomial measure
 * p_1 = (1 + r - a_2) / (a_1 - a_2) is derived; for k > 2 the market is
 * incomplete and the caller must supply the measure (Underdetermined
 * otherwise). Throws ArbitrageError when a_k < 1 + r < a_1 fails and
 * InvalidMeasure when a supplied vector is not a strictly positive
 * probability vector meeting the martingale constraint.
 */
template <typename S>
MultinomialEconomy<S> build_economy(int n, std::vector<S> factors, S rate, S initial_price,
                                    std::optional<std::vector<S>> risk_neutral = std::nullopt) {
    if (n < 1) throw ValidationError("n_periods must be >= 1");
    if (factors.size() < 2) throw ValidationError("need at least two move factors");
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (!(factors[i] > 0)) throw ValidationError("factors must be strictly positive");
        if (i > 0 && !(factors[i - 1] > factors[i]))
            throw ValidationError("factors must be strictly decreasing");
    }
    if (!(rate > S(-1))) throw ValidationError("rate must exceed -1");
    if (!(initial_price > 0)) throw ValidationError("initial_price must be strictly positive");

    const S gross = S(1) + rate;
    if (!(factors.back() < gross && gross < factors.front())) {
        throw ArbitrageError("no-arbitrage violated: need a_k < 1 + r < a_1");
    }

    MultinomialEconomy<S> economy;
    economy.n_periods = n;
    economy.factors = std::move(factors);
    economy.rate = rate;
    economy.initial_price = initial_price;

    if (!risk_neutral) {
        if (economy.k() != 2) {
            throw Underdetermined(
                "k > 2 with no risk-neutral vector: the one-asset market is incomplete; "
                "supply the measure explicitly");
        }
        const S p1 = (gross - economy.factors[1]) / (economy.factors[0] - economy.factors[1]);
        economy.risk_neutral = {p1, S(1) - p1};
    } else {
        economy.risk_neutral = std::move(*risk_neutral);
        if (static_cast<int>(economy.risk_neutral.size()) != economy.k())
            throw InvalidMeasure("risk_neutral length must equal the number of factors");
        S total = 0, drift = 0;
        for (int i = 0; i < economy.k(); ++i) {
            const S& p = economy.risk_neutral[i];
            if (!(p > 0)) throw InvalidMeasure("risk_neutral entries must be strictly positive");
            total += p;
            drift += p * economy.factors[i];
        }
        if (!detail::close(total, S(1), 1e-14))
            throw InvalidMeasure("risk_neutral must sum to 1");
        if (!detail::close(drift, gross, 1e-12))
            throw InvalidMeasure("martingale constraint sum(p_i a_i) = 1 + r violated");
    }
    return economy;
}

/// Number of count classes at time m with k moves: C(m + k - 1, k - 1).
inline std::uint64_t class_count(int m, int k) {
    std::uint64_t result = 1;
    for (int i = 1; i <= k - 1; ++i) {
        result = result * static_cast<std::uint64_t>(m + i) / static_cast<std::uint64_t>(i);
    }
    return result;
}

/**
 * All time-m count classes in canonical order: lexicographically decreasing
 * in (j_1, j_2, ...). For a binomial lattice at m = 2 this is
 * (2,0), (1,1), (0,2).
 */
inline std::vector<CountClass> enumerate_classes(int m, int k) {
    std::vector<CountClass> classes;
    classes.reserve(class_count(m, k));
    CountClass current(k, 0);
    auto emit = [&](auto&& self, int slot, int remaining) -> void {
        if (slot == k - 1) {
            current[slot] = remaining;
            classes.push_back(current);
            return;
        }
        for (int j = remaining; j >= 0; --j) {
            current[slot] = j;
            self(self, slot + 1, remaining - j);
        }
    };
    emit(emit, 0, m);
    return classes;
}

/// Lookup from count class to its position in enumerate_classes(m, k).
class ClassIndex {
public:
    ClassIndex() = default;
    ClassIndex(int m, int k) : classes_(enumerate_classes(m, k)) {
        for (std::size_t i = 0; i < classes_.size(); ++i) index_[classes_[i]] = i;
    }

    const std::vector<CountClass>& classes() const { return classes_; }
    std::size_t size() const { return classes_.size(); }

    std::size_t at(const CountClass& c) const {
        const auto it = index_.find(c);
        if (it == index_.end()) {
            throw ClassMismatch("count class " + format_class(c) + " is not on this lattice level");
        }
        return it->second;
    }

    bool contains(const CountClass& c) const { return index_.count(c) > 0; }

    static std::string format_class(const CountClass& c) {
        std::ostringstream out;
        out << '(';
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (i) out << ' ';
            out << c[i];
        }
        out << ')';
        return out.str();
    }

private:
    std::vector<CountClass> classes_;
    std::map<CountClass, std::size_t> index_;
};

/// Paths are encoded as integers in [0, k^n): the move at time m is digit
/// n-1-m in base k, so increasing indices enumerate move sequences in
/// lexicographic order.
inline std::uint64_t path_count_total(int n, int k) {
    std::uint64_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::uint64_t>(k);
    return total;
}

inline void check_path_cap(int n, int k, std::uint64_t cap) {
    std::uint64_t paths = 1;
    for (int i = 0; i < n; ++i) {
        paths *= static_cast<std::uint64_t>(k);
        if (paths > cap) break;
    }
    const std::uint64_t budget = paths * static_cast<std::uint64_t>(n);
    if (budget > cap) {
        throw CapExceeded("path enumeration needs " + std::to_string(budget) +
                          " path-steps; cap is " + std::to_string(cap));
    }
}

inline std::vector<std::uint8_t> decode_path(std::uint64_t index, int n, int k) {
    std::vector<std::uint8_t> moves(n);
    for (int m = n - 1; m >= 0; --m) {
        moves[m] = static_cast<std::uint8_t>(index % k);
        index /= k;
    }
    return moves;
}

/// Count class reached after the first m moves of a path.
inline CountClass class_of_prefix(const std::vector<std::uint8_t>& moves, int k, int m) {
    CountClass counts(k, 0);
    for (int i = 0; i < m; ++i) ++counts[moves[i]];
    return counts;
}

/// Probability weights over all k^n paths, indexed by path code.
template <typename S>
struct PathMeasure {
    int n = 0;
    int k = 0;
    std::vector<S> weights;

    void validate(double tol = 1e-12) const {
        if (weights.size() != path_count_total(n, k))
            throw ValidationError("path measure must cover all k^n paths");
        S total = 0;
        for (const S& w : weights) {
            if (w < 0) throw InvalidMeasure("path weights must be nonnegative");
            total += w;
        }
        if (!detail::close(total, S(1), tol))
            throw InvalidMeasure("path weights must sum to 1");
    }
};

/// Terminal anticipation: one mass per terminal count class (canonical
/// order); `equivalent` records whether every class is strictly charged.
template <typename S>
struct TerminalLaw {
    int n = 0;
    int k = 0;
    std::vector<S> mass;
    bool equivalent = false;
};

template <typename S>
TerminalLaw<S> make_terminal_law(int n, int k, std::vector<S> mass) {
    if (mass.size() != class_count(n, k))
        throw ClassMismatch("terminal law must assign mass to every terminal class");
    S total = 0;
    bool equivalent = true;
    for (const S& m : mass) {
        if (m < 0) throw InvalidMeasure("terminal law masses must be nonnegative");
        if (!(m > 0)) equivalent = false;
        total += m;
    }
    if (!detail::close(total, S(1), 1e-14))
        throw InvalidMeasure("terminal law masses must sum to 1");
    return TerminalLaw<S>{n, k, std::move(mass), equivalent};
}

/// Exhaustive path table: terminal class per path plus the terminal classes
/// themselves. Per-time prefixes are recovered by decode_path/class_of_prefix.
struct PathTable {
    int n = 0;
    int k = 0;
    std::uint64_t paths = 0;
    std::vector<CountClass> terminal_classes;
    std::vector<std::uint32_t> terminal_class_of_path;
};

template <typename S>
PathTable enumerate_paths(const MultinomialEconomy<S>& economy,
                          std::uint64_t cap = kDefaultPathCap) {
    check_path_cap(economy.n_periods, economy.k(), cap);
    PathTable table;
    table.n = economy.n_periods;
    table.k = economy.k();
    table.paths = path_count_total(table.n, table.k);
    ClassIndex terminal(table.n, table.k);
    table.terminal_classes = terminal.classes();
    table.terminal_class_of_path.resize(table.paths);
    for (std::uint64_t p = 0; p < table.paths; ++p) {
        const auto moves = decode_path(p, table.n, table.k);
        table.terminal_class_of_path[p] =
            static_cast<std::uint32_t>(terminal.at(class_of_prefix(moves, table.k, table.n)));
    }
    return table;
}

/// The i.i.d. product measure with one-step probabilities p.
template <typename S>
PathMeasure<S> risk_neutral_path_measure(const MultinomialEconomy<S>& economy,
                                         std::uint64_t cap = kDefaultPathCap) {
    check_path_cap(economy.n_periods, economy.k(), cap);
    PathMeasure<S> measure;
    measure.n = economy.n_periods;
    measure.k = economy.k();
    const std::uint64_t paths = path_count_total(measure.n, measure.k);
    measure.weights.resize(paths);
    for (std::uint64_t p = 0; p < paths; ++p) {
        S w = 1;
        std::uint64_t code = p;
        for (int m = 0; m < measure.n; ++m) {
            w *= economy.risk_neutral[code % measure.k];
            code /= measure.k;
        }
        measure.weights[p] = w;
    }
    return measure;
}

/// Pushforward of a path measure onto terminal count classes.
template <typename S>
TerminalLaw<S> terminal_law(const MultinomialEconomy<S>& economy, const PathMeasure<S>& measure,
                            std::uint64_t cap = kDefaultPathCap) {
    if (measure.n != economy.n_periods || measure.k != economy.k())
        throw ValidationError("path measure shape does not match the economy");
    if (measure.weights.size() != path_count_total(measure.n, measure.k))
        throw ValidationError("path measure must cover all k^n paths");
    const PathTable table = enumerate_paths(economy, cap);
    std::vector<S> mass(table.terminal_classes.size(), S(0));
    for (std::uint64_t p = 0; p < table.paths; ++p) {
        mass[table.terminal_class_of_path[p]] += measure.weights[p];
    }
    TerminalLaw<S> law;
    law.n = measure.n;
    law.k = measure.k;
    law.mass = std::move(mass);
    law.equivalent = true;
    for (const S& m : law.mass) {
        if (!(m > 0)) {
            law.equivalent = false;
            break;
        }
    }
    return law;
}

/// Risk-neutral terminal class mass: multinomial(n; j) * prod p_i^{j_i},
/// computed directly (no path enumeration).
template <typename S>
std::vector<S> risk_neutral_class_mass(const MultinomialEconomy<S>& economy) {
    const auto classes = enumerate_classes(economy.n_periods, economy.k());
    std::vector<S> mass(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        S w = multinomial_coefficient<S>(classes[c]);
        for (int i = 0; i < economy.k(); ++i) {
            for (int rep = 0; rep < classes[c][i]; ++rep) w *= economy.risk_neutral[i];
        }
        mass[c] = w;
    }
    return mass;
}

/// Price at a node: s * a_1^{j_1} * ... * a_k^{j_k}.
template <typename S>
S price_of_class(const MultinomialEconomy<S>& economy, const CountClass& state) {
    S price = economy.initial_price;
    for (int i = 0; i < economy.k(); ++i) {
        for (int rep = 0; rep < state[i]; ++rep) price *= economy.factors[i];
    }
    return price;
}

/**
 * Groups of distinct time-m count classes sharing one price level (factor
 * products coinciding, e.g. a_2^2 = a_1 a_3). Aliased states are reported so
 * callers know price-level identification would merge genuinely different
 * nodes; the library itself always keys nodes by count class.
 */
template <typename S>
std::vector<std::vector<CountClass>> price_aliasing_report(const MultinomialEconomy<S>& economy,
                                                           int m) {
    const auto classes = enumerate_classes(m, economy.k());
    std::vector<std::pair<S, CountClass>> priced;
    priced.reserve(classes.size());
    for (const auto& c : classes) priced.emplace_back(price_of_class(economy, c), c);
    std::sort(priced.begin(), priced.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    auto same_price = [](const S& a, const S& b) {
        if constexpr (detail::is_rational_v<S>) {
            return a == b;
        } else {
            return std::abs(a - b) <= 1e-12 * (std::abs(a) + std::abs(b));
        }
    };
    std::vector<std::vector<CountClass>> groups;
    std::size_t i = 0;
    while (i < priced.size()) {
        std::size_t j = i + 1;
        while (j < priced.size() && same_price(priced[i].first, priced[j].first)) ++j;
        if (j - i > 1) {
            std::vector<CountClass> group;
            for (std::size_t g = i; g < j; ++g) group.push_back(priced[g].second);
            groups.push_back(std::move(group));
        }
        i = j;
    }
    return groups;
}

} // namespace weakinfo

#endif
