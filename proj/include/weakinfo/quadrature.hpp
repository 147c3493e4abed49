#ifndef WEAKINFO_QUADRATURE_HPP
#define WEAKINFO_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "weakinfo/errors.hpp"

namespace weakinfo {

/// Nodes and weights for sum w_i f(x_i) ~ integral of f(x) e^{-x^2} dx.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

/// Hermite functions psi_j(x) = H_j(x) e^{-x^2/2} / sqrt(2^j j! sqrt(pi)) via
/// their three-term recurrence. Bounded for all j and x, unlike the raw
/// polynomial recurrence, which overflows near 500 nodes; the only limit is
/// e^{-x^2/2} underflow in psi_0, safe for |x| < 37 and hence for every node
/// of rules up to ~600 points.
inline void hermite_function_pair(int m, double x, double& psi_m, double& psi_m_minus_1) {
    double prev = 0.0;
    double current = 0.7511255444649424828587030047762; // pi^{-1/4}
    current *= std::exp(-0.5 * x * x);
    for (int j = 0; j < m; ++j) {
        const double next =
            x * std::sqrt(2.0 / (j + 1)) * current - std::sqrt(j / (j + 1.0)) * prev;
        prev = current;
        current = next;
    }
    psi_m = current;
    psi_m_minus_1 = prev;
}

} // namespace detail

/**
 * m-point Gauss-Hermite rule. Roots of the m-th Hermite function by Newton
 * iteration from the classical initial guesses (largest root first, then
 * stepping inward), weights w_i = e^{-x_i^2} / (m psi_{m-1}(x_i)^2) assembled
 * in log space so tail nodes underflow cleanly to zero instead of producing
 * NaNs.
 */
inline GaussHermite gauss_hermite(int m) {
    if (m < 1) throw ValidationError("quadrature rule needs >= 1 node");
    GaussHermite rule;
    rule.nodes.assign(m, 0.0);
    rule.weights.assign(m, 0.0);

    const int half = (m + 1) / 2;
    std::vector<double> roots(half); // positive-side roots, descending
    double z = 0;
    for (int i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * m + 1.0) - 1.85575 * std::pow(2.0 * m + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(m), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * roots[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * roots[1];
        } else {
            z = 2.0 * z - roots[i - 2];
        }
        double psi = 0, psi_prev = 0;
        bool converged = false;
        for (int iter = 0; iter < 200; ++iter) {
            detail::hermite_function_pair(m, z, psi, psi_prev);
            const double derivative = std::sqrt(2.0 * m) * psi_prev - z * psi;
            const double step = psi / derivative;
            z -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw QuadratureDivergence("node search failed for rule size " + std::to_string(m));
        }
        detail::hermite_function_pair(m, z, psi, psi_prev);
        roots[i] = z;
        const double log_weight =
            -z * z - std::log(static_cast<double>(m)) - 2.0 * std::log(std::abs(psi_prev));
        const double weight = std::exp(log_weight);
        rule.nodes[i] = z;
        rule.weights[i] = weight;
        rule.nodes[m - 1 - i] = -z;
        rule.weights[m - 1 - i] = weight;
    }
    if (m % 2 == 1) {
        // Middle node is exactly 0; overwrite the duplicated slot cleanly.
        double psi = 0, psi_prev = 0;
        detail::hermite_function_pair(m, 0.0, psi, psi_prev);
        rule.nodes[half - 1] = 0.0;
        rule.weights[half - 1] =
            std::exp(-std::log(static_cast<double>(m)) - 2.0 * std::log(std::abs(psi_prev)));
    }
    return rule;
}

/// sum over an m-point rule approximating E[f(Z)] for Z ~ N(mean, sd^2).
inline double integrate_gaussian(const std::function<double(double)>& f, double mean, double sd,
                                 const GaussHermite& rule) {
    const double inv_sqrt_pi = 0.56418958354775628694807945156077;
    const double sqrt2 = 1.4142135623730950488016887242097;
    double total = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        total += rule.weights[i] * f(mean + sqrt2 * sd * rule.nodes[i]);
    }
    return total * inv_sqrt_pi;
}

struct QuadratureOptions {
    double tolerance = 1e-10; // |value(2m) - value(m)| stop threshold
    int initial_nodes = 32;
    int max_nodes = 512;
};

struct RefinedIntegral {
    double value = 0;
    double residual = 0; // last refinement step size
    int nodes = 0;
};

/**
 * Node-doubling refinement of E[f(Z)], Z ~ N(mean, sd^2): evaluates at m,
 * 2m, 4m, ... nodes until consecutive values agree within the tolerance;
 * throws QuadratureDivergence if max_nodes is reached without stabilizing.
 */
inline RefinedIntegral refine_gaussian(const std::function<double(double)>& f, double mean,
                                       double sd, const QuadratureOptions& options = {}) {
    int m = options.initial_nodes;
    double previous = integrate_gaussian(f, mean, sd, gauss_hermite(m));
    while (2 * m <= options.max_nodes) {
        m *= 2;
        const double current = integrate_gaussian(f, mean, sd, gauss_hermite(m));
        const double residual = std::abs(current - previous);
        if (residual < options.tolerance) {
            return RefinedIntegral{current, residual, m};
        }
        previous = current;
    }
    throw QuadratureDivergence("integral did not stabilize within " +
                               std::to_string(options.max_nodes) + " nodes");
}

} // namespace weakinfo

#endif
