#ifndef WEAKINFO_VALUATION_HPP
#define WEAKINFO_VALUATION_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "weakinfo/errors.hpp"
#include "weakinfo/lattice.hpp"
#include "weakinfo/quadrature.hpp"
#include "weakinfo/utility.hpp"

namespace weakinfo {

struct ValuationResult {
    double value = 0;           // attained expected utility u(x, nu)
    double lambda = 0;          // budget multiplier
    double budget_residual = 0; // budget(lambda) - x
    std::vector<double> terminal_wealth; // per terminal class (discrete case)
    int quadrature_nodes = 0;       // continuous case only
    double quadrature_residual = 0; // continuous case only
};

namespace detail {

inline constexpr double kLambdaFloor = 1e-300;
inline constexpr double kLambdaCeil = 1e300;
inline constexpr double kBudgetRelTol = 1e-13;

/**
 * Solves budget(lambda) = x for a strictly decreasing budget map by geometric
 * bracket expansion followed by bisection in log space. The 600-decade
 * bracket window is the practical positive double range; failing to bracket
 * inside it means the utility's marginal does not actually sweep (0, inf).
 */
inline double solve_budget_equation(const std::function<double(double)>& budget, double x) {
    if (!(x > 0)) throw ValidationError("initial wealth must be strictly positive");
    double lo = 1.0, hi = 1.0;
    double b_lo = budget(lo);
    double b_hi = b_lo;
    // Want budget(lo) >= x >= budget(hi).
    while (b_lo < x) {
        lo /= 16.0;
        if (lo < kLambdaFloor)
            throw BracketFailure("no multiplier above 1e-300 reaches the budget " +
                                 std::to_string(x));
        b_lo = budget(lo);
    }
    while (b_hi > x) {
        hi *= 16.0;
        if (hi > kLambdaCeil)
            throw BracketFailure("no multiplier below 1e300 reaches the budget " +
                                 std::to_string(x));
        b_hi = budget(hi);
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = std::sqrt(lo * hi);
        const double b_mid = budget(mid);
        if (std::abs(b_mid - x) <= kBudgetRelTol * x) return mid;
        (b_mid > x ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return std::sqrt(lo * hi);
}

} // namespace detail

/**
 * Budget multiplier for a discrete terminal profile: the unique lambda > 0
 * with sum_y I(lambda / xi(y)) ref(y) discount^n = x. `discount` is the
 * per-step factor 1 / (1 + r).
 */
inline double solve_lambda(const Utility& utility, const std::vector<double>& xi,
                           const std::vector<double>& reference_mass, double x, double discount,
                           int n_steps) {
    if (xi.size() != reference_mass.size())
        throw ValidationError("xi and reference law must have equal length");
    const double total_discount = std::pow(discount, n_steps);
    auto budget = [&](double lambda) {
        double total = 0;
        for (std::size_t i = 0; i < xi.size(); ++i) {
            if (!(reference_mass[i] > 0)) continue;
            total += utility.I(lambda / xi[i]) * reference_mass[i];
        }
        return total * total_discount;
    };
    return detail::solve_budget_equation(budget, x);
}

/**
 * Core class-level valuation: given the density xi = d(nu)/d(ref) per
 * terminal class and the reference class masses, computes the multiplier,
 * the optimal terminal wealth profile I(lambda / xi), and the attained
 * expected utility sum_y U(I(lambda / xi(y))) nu(y), with the budget
 * discounted by total_discount under the reference law.
 */
inline ValuationResult value_from_classes(const Utility& utility, const std::vector<double>& xi,
                                          const std::vector<double>& reference_mass, double x,
                                          double total_discount) {
    if (xi.size() != reference_mass.size())
        throw ValidationError("xi and reference law must have equal length");
    for (double v : xi) {
        if (!(v > 0)) throw NotEquivalent("valuation requires xi > 0 on every charged class");
    }
    auto budget = [&](double lambda) {
        double total = 0;
        for (std::size_t i = 0; i < xi.size(); ++i) {
            if (!(reference_mass[i] > 0)) continue;
            total += utility.I(lambda / xi[i]) * reference_mass[i];
        }
        return total * total_discount;
    };
    ValuationResult result;
    result.lambda = detail::solve_budget_equation(budget, x);
    result.budget_residual = budget(result.lambda) - x;
    result.terminal_wealth.resize(xi.size());
    double value = 0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        result.terminal_wealth[i] = utility.I(result.lambda / xi[i]);
        if (reference_mass[i] > 0) {
            value += utility.U(result.terminal_wealth[i]) * xi[i] * reference_mass[i];
        }
    }
    result.value = value;
    return result;
}

/**
 * Financial value of the anticipation nu on a lattice economy: the insider
 * budget is priced under the risk-neutral law with (1+r)^{-n} discounting and
 * the terminal profile is optimal for the minimal measure, whose terminal law
 * is nu itself. Requires an equivalent nu.
 */
inline ValuationResult value_discrete(const MultinomialEconomy<double>& economy,
                                      const TerminalLaw<double>& nu, const Utility& utility,
                                      double x) {
    if (nu.n != economy.n_periods || nu.k != economy.k())
        throw ClassMismatch("terminal law shape does not match the economy");
    if (!nu.equivalent)
        throw NotEquivalent("valuation requires an equivalent terminal law (all classes charged)");
    const std::vector<double> reference = risk_neutral_class_mass(economy);
    std::vector<double> xi(reference.size());
    for (std::size_t c = 0; c < reference.size(); ++c) xi[c] = nu.mass[c] / reference[c];
    const double discount_total = std::pow(1.0 + economy.rate, -economy.n_periods);
    return value_from_classes(utility, xi, reference, x, discount_total);
}

/**
 * Continuous-setting value: u = integral of U(I(lambda / xi(y))) xi(y) P(dy)
 * with the budget integral of I(lambda / xi(y)) P(dy) = x (no discounting;
 * the reference law P is the quadrature's Gaussian). The whole valuation is
 * refined by node doubling until u stabilizes. The caller supplies xi already
 * normalized so that xi dP integrates to 1.
 */
inline ValuationResult value_continuous(const std::function<double(double)>& xi, double law_mean,
                                        double law_sd, const Utility& utility, double x,
                                        const QuadratureOptions& options = {}) {
    auto value_at = [&](int nodes, ValuationResult& out) {
        const GaussHermite rule = gauss_hermite(nodes);
        const double inv_sqrt_pi = 0.56418958354775628694807945156077;
        const double sqrt2 = 1.4142135623730950488016887242097;
        std::vector<double> points(rule.nodes.size()), masses(rule.nodes.size()),
            densities(rule.nodes.size());
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            points[i] = law_mean + sqrt2 * law_sd * rule.nodes[i];
            masses[i] = rule.weights[i] * inv_sqrt_pi;
            densities[i] = xi(points[i]);
            if (!(densities[i] > 0))
                throw ValidationError("xi must be strictly positive on the quadrature support");
        }
        auto budget = [&](double lambda) {
            double total = 0;
            for (std::size_t i = 0; i < masses.size(); ++i) {
                if (!(masses[i] > 0)) continue;
                total += utility.I(lambda / densities[i]) * masses[i];
            }
            return total;
        };
        out.lambda = detail::solve_budget_equation(budget, x);
        out.budget_residual = budget(out.lambda) - x;
        double value = 0;
        for (std::size_t i = 0; i < masses.size(); ++i) {
            if (!(masses[i] > 0)) continue;
            value += utility.U(utility.I(out.lambda / densities[i])) * densities[i] * masses[i];
        }
        out.value = value;
        out.quadrature_nodes = nodes;
    };

    int m = options.initial_nodes;
    ValuationResult previous;
    value_at(m, previous);
    while (2 * m <= options.max_nodes) {
        m *= 2;
        ValuationResult current;
        value_at(m, current);
        current.quadrature_residual = std::abs(current.value - previous.value);
        if (current.quadrature_residual < options.tolerance) return current;
        previous = current;
    }
    throw QuadratureDivergence("value did not stabilize within " +
                               std::to_string(options.max_nodes) + " quadrature nodes");
}

/// Per-node wealth V[m][class index at level m] plus the terminal profile.
struct WealthProcess {
    int n = 0;
    int k = 0;
    double lambda = 0;
    std::vector<std::vector<double>> node_value; // [m][class idx], m = 0..n
    double initial_residual = 0;                 // V_0 - x
};

/**
 * Optimal wealth process: terminal values I(lambda / xi(class)), earlier
 * nodes by backward induction V_m = sum p_i V_{m+1}(child_i) / (1 + r); the
 * root value reproduces x up to the multiplier solver's tolerance.
 */
inline WealthProcess optimal_wealth_process(const MultinomialEconomy<double>& economy,
                                            const TerminalLaw<double>& nu, const Utility& utility,
                                            double x) {
    const ValuationResult valuation = value_discrete(economy, nu, utility, x);
    const int n = economy.n_periods;
    const int k = economy.k();

    WealthProcess wealth;
    wealth.n = n;
    wealth.k = k;
    wealth.lambda = valuation.lambda;
    wealth.node_value.resize(n + 1);
    wealth.node_value[n] = valuation.terminal_wealth;

    const double gross = 1.0 + economy.rate;
    for (int m = n - 1; m >= 0; --m) {
        const ClassIndex level(m, k);
        const ClassIndex next(m + 1, k);
        wealth.node_value[m].assign(level.size(), 0.0);
        for (std::size_t s = 0; s < level.size(); ++s) {
            CountClass child = level.classes()[s];
            double expect = 0;
            for (int move = 0; move < k; ++move) {
                ++child[move];
                expect += economy.risk_neutral[move] * wealth.node_value[m + 1][next.at(child)];
                --child[move];
            }
            wealth.node_value[m][s] = expect / gross;
        }
    }
    wealth.initial_residual = wealth.node_value[0][0] - x;
    return wealth;
}

/// Largest one-step violation of E[V_{m+1} | node] / (1+r) = V_m over nodes.
inline double martingale_residual(const MultinomialEconomy<double>& economy,
                                  const WealthProcess& wealth) {
    const double gross = 1.0 + economy.rate;
    double worst = 0;
    for (int m = 0; m < wealth.n; ++m) {
        const ClassIndex level(m, wealth.k);
        const ClassIndex next(m + 1, wealth.k);
        for (std::size_t s = 0; s < level.size(); ++s) {
            CountClass child = level.classes()[s];
            double expect = 0;
            for (int move = 0; move < wealth.k; ++move) {
                ++child[move];
                expect += economy.risk_neutral[move] * wealth.node_value[m + 1][next.at(child)];
                --child[move];
            }
            worst = std::max(worst, std::abs(expect / gross - wealth.node_value[m][s]));
        }
    }
    return worst;
}

/// Replicating position per node: risky share count and bond (cash) value.
struct HedgeStrategy {
    int n = 0;
    int k = 0;
    std::vector<std::vector<double>> risky_shares; // [m][class idx], m = 0..n-1
    std::vector<std::vector<double>> bond_value;   // wealth not in the risky asset
};

/**
 * Unique binomial replication of a wealth process: at each node the share
 * count theta = (V_up - V_down) / (S (a_1 - a_2)) and the remainder sits in
 * the bond. Lattices with k > 2 moves have no unique replication
 * (IncompleteMarket).
 */
inline HedgeStrategy hedge_strategy(const MultinomialEconomy<double>& economy,
                                    const WealthProcess& wealth) {
    if (economy.k() != 2)
        throw IncompleteMarket("unique replication requires a binomial lattice (k = 2)");
    const int n = wealth.n;
    HedgeStrategy hedge;
    hedge.n = n;
    hedge.k = 2;
    hedge.risky_shares.resize(n);
    hedge.bond_value.resize(n);
    const double spread = economy.factors[0] - economy.factors[1];
    for (int m = 0; m < n; ++m) {
        const ClassIndex level(m, 2);
        const ClassIndex next(m + 1, 2);
        hedge.risky_shares[m].assign(level.size(), 0.0);
        hedge.bond_value[m].assign(level.size(), 0.0);
        for (std::size_t s = 0; s < level.size(); ++s) {
            CountClass up = level.classes()[s], down = level.classes()[s];
            ++up[0];
            ++down[1];
            const double price = price_of_class(economy, level.classes()[s]);
            const double v_up = wealth.node_value[m + 1][next.at(up)];
            const double v_down = wealth.node_value[m + 1][next.at(down)];
            const double theta = (v_up - v_down) / (price * spread);
            hedge.risky_shares[m][s] = theta;
            hedge.bond_value[m][s] = wealth.node_value[m][s] - theta * price;
        }
    }
    return hedge;
}

/**
 * Forward-simulates the self-financing strategy from initial wealth x across
 * the whole lattice and reports the largest node-for-node deviation from the
 * given wealth process. (Both moves out of every node are simulated, so
 * recombining nodes are reached from every parent and checked for agreement.)
 */
inline double replication_error(const MultinomialEconomy<double>& economy,
                                const WealthProcess& wealth, const HedgeStrategy& hedge,
                                double x) {
    const int n = wealth.n;
    const double gross = 1.0 + economy.rate;
    double worst = std::abs(wealth.node_value[0][0] - x);
    std::vector<double> current{x};
    for (int m = 0; m < n; ++m) {
        const ClassIndex level(m, 2);
        const ClassIndex next(m + 1, 2);
        std::vector<double> following(next.size(), 0.0);
        std::vector<bool> seen(next.size(), false);
        for (std::size_t s = 0; s < level.size(); ++s) {
            const double price = price_of_class(economy, level.classes()[s]);
            const double theta = hedge.risky_shares[m][s];
            const double cash = current[s] - theta * price;
            for (int move = 0; move < 2; ++move) {
                CountClass child = level.classes()[s];
                ++child[move];
                const std::size_t target = next.at(child);
                const double value = theta * price * economy.factors[move] + cash * gross;
                if (seen[target]) {
                    worst = std::max(worst, std::abs(following[target] - value));
                } else {
                    following[target] = value;
                    seen[target] = true;
                }
                worst = std::max(worst,
                                 std::abs(value - wealth.node_value[m + 1][target]));
            }
        }
        current = std::move(following);
    }
    return worst;
}

} // namespace weakinfo

#endif
