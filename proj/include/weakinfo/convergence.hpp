#ifndef WEAKINFO_CONVERGENCE_HPP
#define WEAKINFO_CONVERGENCE_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "weakinfo/errors.hpp"
#include "weakinfo/lattice.hpp"
#include "weakinfo/quadrature.hpp"
#include "weakinfo/rational.hpp"
#include "weakinfo/valuation.hpp"

namespace weakinfo {

/**
 * A bounded anticipation density against a continuous Gaussian terminal law,
 * together with the recipe for inducing its lattice discretizations: evaluate
 * xi at the embedded terminal point of each count class and renormalize so
 * the induced law is a probability. xi is normalized (its integral against
 * the law is 1) and bounded by `bound`.
 */
struct AnticipationFamily {
    std::string name;
    std::function<double(double)> xi;
    double bound = 1;
    double law_mean = 0;
    double law_sd = 1;
};

/// The trivial anticipation: no information, xi identically 1.
inline AnticipationFamily uniform_anticipation(double law_mean = 0, double law_sd = 1) {
    AnticipationFamily family;
    family.name = "uniform";
    family.xi = [](double) { return 1.0; };
    family.bound = 1;
    family.law_mean = law_mean;
    family.law_sd = law_sd;
    return family;
}

/**
 * Capped exponential tilt: xi(y) proportional to min(exp(theta y - theta^2
 * sd^2 / 2), cap), normalized against N(mean, sd^2) by converged quadrature.
 * The cap keeps the density bounded (and with it every induced lattice
 * density) without materially moving the integrals: at the default cap the
 * kink sits far out in the Gaussian tail.
 */
inline AnticipationFamily tilted_anticipation(double theta, double cap = 60.0, double law_mean = 0,
                                              double law_sd = 1) {
    if (!(cap > 0)) throw ValidationError("tilt cap must be strictly positive");
    const double centering = theta * theta * law_sd * law_sd / 2.0;
    auto raw = [theta, centering, cap, law_mean](double y) {
        return std::min(std::exp(theta * (y - law_mean) - centering), cap);
    };
    QuadratureOptions options;
    options.tolerance = 1e-13;
    const double z = refine_gaussian(raw, law_mean, law_sd, options).value;

    AnticipationFamily family;
    family.name = "tilt:" + std::to_string(theta) + ":" + std::to_string(cap);
    family.xi = [raw, z](double y) { return raw(y) / z; };
    family.bound = cap / z;
    family.law_mean = law_mean;
    family.law_sd = law_sd;
    return family;
}

/**
 * A symmetric lattice walk family indexed by `level`:
 *   level 2 -> binomial (+-1 steps), level 3 -> trinomial, level N ->
 *   2^{N-2} fair Bernoulli components per step (step support has 2^{N-2}+1
 *   points).
 * Terminal count classes order step values descending; the embedded point of
 * a class is 2 (sum of Bernoulli successes - M n / 2) / sqrt(n) with
 * M = 2^{level-2}, and the embedded endpoint law converges to N(0, M).
 */
struct DiscretizedAnticipation {
    int n = 0;
    int level = 2;
    int outcomes = 2;                // M + 1 step values
    std::vector<double> points;      // embedded terminal point per class
    std::vector<double> ref_mass;    // reference (symmetric-walk) class mass
    std::vector<double> xi_n;        // induced density per class
    std::vector<double> nu_mass;     // induced anticipation per class
    double normalizer = 1;           // sum of xi(point) ref_mass before renormalizing
    double sup_xi = 0;               // max induced density (boundedness report)
};

inline int bernoulli_components(int level) {
    if (level < 2) throw ValidationError("walk level must be >= 2");
    if (level > 12) throw ValidationError("walk level above 12 is not supported");
    return 1 << (level - 2);
}

/// Limit endpoint standard deviation for a level-N symmetric walk.
inline double limit_sd_for_level(int level) {
    return std::sqrt(static_cast<double>(bernoulli_components(level)));
}

inline DiscretizedAnticipation discretize_anticipation(const AnticipationFamily& family, int n,
                                                       int level,
                                                       std::uint64_t class_cap = 4'000'000) {
    const int m_components = bernoulli_components(level);
    const int outcomes = m_components + 1;
    if (class_count(n, outcomes) > class_cap) {
        throw CapExceeded("level " + std::to_string(level) + " walk with n = " +
                          std::to_string(n) + " needs " +
                          std::to_string(class_count(n, outcomes)) + " classes; cap is " +
                          std::to_string(class_cap));
    }

    // log mass of one step value: value index i (descending) has Bernoulli sum
    // v = M - i, step probability C(M, v) / 2^M.
    std::vector<double> step_log_mass(outcomes);
    for (int i = 0; i < outcomes; ++i) {
        const int v = m_components - i;
        step_log_mass[i] = log_multinomial({v, m_components - v}) -
                           m_components * 0.6931471805599453094172321214582;
    }

    const auto classes = enumerate_classes(n, outcomes);
    DiscretizedAnticipation result;
    result.n = n;
    result.level = level;
    result.outcomes = outcomes;
    result.points.resize(classes.size());
    result.ref_mass.resize(classes.size());
    result.xi_n.resize(classes.size());
    result.nu_mass.resize(classes.size());

    const double sqrt_n = std::sqrt(static_cast<double>(n));
    double normalizer = 0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        double log_mass = log_multinomial(classes[c]);
        double successes = 0;
        for (int i = 0; i < outcomes; ++i) {
            log_mass += classes[c][i] * step_log_mass[i];
            successes += static_cast<double>(classes[c][i]) * (m_components - i);
        }
        result.ref_mass[c] = std::exp(log_mass);
        result.points[c] = 2.0 * (successes - 0.5 * m_components * n) / sqrt_n;
        normalizer += family.xi(result.points[c]) * result.ref_mass[c];
    }
    result.normalizer = normalizer;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        result.xi_n[c] = family.xi(result.points[c]) / normalizer;
        result.nu_mass[c] = result.xi_n[c] * result.ref_mass[c];
        result.sup_xi = std::max(result.sup_xi, result.xi_n[c]);
    }
    return result;
}

struct SweepRow {
    int n = 0;
    double u_discrete = 0;
    double u_limit = 0;
    double abs_error = 0;
    double seconds = 0;
};

struct ConvergenceReport {
    std::vector<SweepRow> rows;
    double u_limit = 0;
    double lambda_limit = 0;  // multiplier of the continuous valuation
    double lambda_final = 0;  // multiplier at the largest n (convergence probe)
    bool trend_decreasing = false; // last three errors strictly decreasing
};

/**
 * Evaluates the information value on refining lattices against the continuous
 * closed-form limit. Everything is class-level (no path enumeration), so
 * binomial sweeps remain cheap to n ~ 2^14.
 */
inline ConvergenceReport convergence_sweep(const AnticipationFamily& family,
                                           const Utility& utility, double x, int level,
                                           const std::vector<int>& n_list,
                                           const QuadratureOptions& quadrature = {}) {
    if (n_list.empty()) throw ValidationError("n_list must not be empty");
    for (std::size_t i = 1; i < n_list.size(); ++i) {
        if (n_list[i] <= n_list[i - 1])
            throw ValidationError("n_list must be strictly increasing");
    }
    if (std::abs(family.law_mean) > 1e-12 ||
        std::abs(family.law_sd - limit_sd_for_level(level)) > 1e-9) {
        throw ValidationError("anticipation family law must be the level-" +
                              std::to_string(level) + " walk limit N(0, " +
                              std::to_string(limit_sd_for_level(level)) + "^2)");
    }

    ConvergenceReport report;
    const ValuationResult limit =
        value_continuous(family.xi, family.law_mean, family.law_sd, utility, x, quadrature);
    report.u_limit = limit.value;
    report.lambda_limit = limit.lambda;

    for (int n : n_list) {
        const auto start = std::chrono::steady_clock::now();
        const DiscretizedAnticipation lattice = discretize_anticipation(family, n, level);
        const ValuationResult discrete =
            value_from_classes(utility, lattice.xi_n, lattice.ref_mass, x, 1.0);
        const auto stop = std::chrono::steady_clock::now();
        SweepRow row;
        row.n = n;
        row.u_discrete = discrete.value;
        row.u_limit = limit.value;
        row.abs_error = std::abs(discrete.value - limit.value);
        row.seconds = std::chrono::duration<double>(stop - start).count();
        report.rows.push_back(row);
        report.lambda_final = discrete.lambda;
    }

    if (report.rows.size() >= 3) {
        const std::size_t last = report.rows.size() - 1;
        report.trend_decreasing = report.rows[last - 2].abs_error > report.rows[last - 1].abs_error &&
                                  report.rows[last - 1].abs_error > report.rows[last].abs_error;
    }
    return report;
}

struct LemmaRow {
    int n = 0;
    double integral_n = 0;     // integral of f_n against mu_n
    double integral_limit = 0; // integral of f_0 against mu_0
    double abs_diff = 0;
};

/**
 * Joint integral-convergence probe: for uniformly bounded f_n converging
 * locally uniformly to f_0 and discrete laws mu_n converging to the Gaussian
 * mu_0, checks that integral f_n d mu_n approaches integral f_0 d mu_0.
 * f(0, y) is the limit function; measure(n) returns mu_n as aligned
 * (points, masses).
 */
inline std::vector<LemmaRow> lemma_integral_check(
    const std::function<double(int, double)>& f,
    const std::function<std::pair<std::vector<double>, std::vector<double>>(int)>& measure,
    double law_mean, double law_sd, const std::vector<int>& n_list,
    const QuadratureOptions& quadrature = {}) {
    const double limit =
        refine_gaussian([&](double y) { return f(0, y); }, law_mean, law_sd, quadrature).value;
    std::vector<LemmaRow> rows;
    rows.reserve(n_list.size());
    for (int n : n_list) {
        const auto [points, masses] = measure(n);
        if (points.size() != masses.size())
            throw ValidationError("measure(n) must return aligned points and masses");
        double total = 0;
        for (std::size_t i = 0; i < points.size(); ++i) total += f(n, points[i]) * masses[i];
        rows.push_back(LemmaRow{n, total, limit, std::abs(total - limit)});
    }
    return rows;
}

} // namespace weakinfo

#endif
