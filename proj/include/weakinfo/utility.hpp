#ifndef WEAKINFO_UTILITY_HPP
#define WEAKINFO_UTILITY_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "weakinfo/errors.hpp"

namespace weakinfo {

/**
 * A utility function on x > 0 together with the two evaluators the solvers
 * need: the marginal U' and its inverse I. U(x) = -inf for x <= 0.
 *
 * For custom (tabulated) utilities `uprime` may be empty; validation then
 * differentiates U by central differences. Solvers only ever use I.
 */
struct Utility {
    std::string name;
    std::function<double(double)> u;
    std::function<double(double)> uprime; // may be empty for custom utilities
    std::function<double(double)> inverse_marginal;

    double U(double x) const { return u(x); }
    double I(double y) const { return inverse_marginal(y); }
};

inline Utility log_utility() {
    Utility spec;
    spec.name = "log";
    spec.u = [](double x) {
        return x > 0 ? std::log(x) : -std::numeric_limits<double>::infinity();
    };
    spec.uprime = [](double x) { return 1.0 / x; };
    spec.inverse_marginal = [](double y) { return 1.0 / y; };
    return spec;
}

/// Power (CRRA) utility U(x) = x^alpha / alpha with alpha in (0, 1).
inline Utility power_utility(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw ValidationError("power utility exponent must lie in (0, 1)");
    Utility spec;
    spec.name = "power:" + std::to_string(alpha);
    spec.u = [alpha](double x) {
        return x > 0 ? std::pow(x, alpha) / alpha : -std::numeric_limits<double>::infinity();
    };
    spec.uprime = [alpha](double x) { return std::pow(x, alpha - 1.0); };
    spec.inverse_marginal = [alpha](double y) { return std::pow(y, 1.0 / (alpha - 1.0)); };
    return spec;
}

inline Utility custom_utility(std::string name, std::function<double(double)> u,
                              std::function<double(double)> inverse_marginal,
                              std::function<double(double)> uprime = nullptr) {
    Utility spec;
    spec.name = "custom:" + std::move(name);
    spec.u = std::move(u);
    spec.inverse_marginal = std::move(inverse_marginal);
    spec.uprime = std::move(uprime);
    return spec;
}

/**
 * Monotone cubic Hermite interpolant (Fritsch-Carlson limiter): never
 * overshoots, preserves strict monotonicity of the data. Outside the knots it
 * extrapolates linearly with the boundary slope.
 */
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> xs, std::vector<double> ys)
        : xs_(std::move(xs)), ys_(std::move(ys)) {
        const std::size_t n = xs_.size();
        if (n < 2 || ys_.size() != n)
            throw ValidationError("interpolation table needs >= 2 aligned rows");
        for (std::size_t i = 1; i < n; ++i) {
            if (!(xs_[i] > xs_[i - 1]))
                throw ValidationError("interpolation abscissae must be strictly increasing");
        }
        std::vector<double> secants(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            secants[i] = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
        }
        slopes_.resize(n);
        slopes_[0] = secants[0];
        slopes_[n - 1] = secants[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            slopes_[i] = (secants[i - 1] * secants[i] > 0)
                             ? 0.5 * (secants[i - 1] + secants[i])
                             : 0.0;
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (secants[i] == 0.0) {
                slopes_[i] = slopes_[i + 1] = 0.0;
                continue;
            }
            const double a = slopes_[i] / secants[i];
            const double b = slopes_[i + 1] / secants[i];
            const double norm2 = a * a + b * b;
            if (norm2 > 9.0) {
                const double tau = 3.0 / std::sqrt(norm2);
                slopes_[i] = tau * a * secants[i];
                slopes_[i + 1] = tau * b * secants[i];
            }
        }
    }

    double operator()(double x) const {
        const std::size_t n = xs_.size();
        if (x <= xs_.front()) return ys_.front() + slopes_.front() * (x - xs_.front());
        if (x >= xs_.back()) return ys_.back() + slopes_.back() * (x - xs_.back());
        std::size_t lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (xs_[mid] <= x ? lo : hi) = mid;
        }
        const double h = xs_[lo + 1] - xs_[lo];
        const double t = (x - xs_[lo]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1;
        const double h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2;
        const double h11 = t3 - t2;
        return h00 * ys_[lo] + h10 * h * slopes_[lo] + h01 * ys_[lo + 1] + h11 * h * slopes_[lo + 1];
    }

private:
    std::vector<double> xs_, ys_;
    std::vector<double> slopes_;
};

/**
 * Utility from a table of rows (x, U(x), U'(x)) with x strictly increasing,
 * U strictly increasing, U' strictly decreasing and positive.
 *
 * U is the monotone-cubic interpolant of (x, U); the inverse marginal I is
 * the monotone-cubic interpolant of the swapped pairs (U'(x), x). Outside the
 * marginal's tabulated range I is clamped to the boundary wealth values, so a
 * budget that needs wealth outside the table surfaces as BracketFailure
 * rather than extrapolated nonsense.
 */
inline Utility tabulated_utility(const std::vector<double>& xs, const std::vector<double>& us,
                                 const std::vector<double>& uprimes,
                                 const std::string& name = "tabulated") {
    const std::size_t n = xs.size();
    if (n < 3 || us.size() != n || uprimes.size() != n)
        throw ValidationError("tabulated utility needs >= 3 aligned (x, U, U') rows");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0)) throw ValidationError("tabulated utility: x must be strictly positive");
        if (!(uprimes[i] > 0))
            throw ValidationError("tabulated utility: marginal must be strictly positive");
        if (i > 0) {
            if (!(us[i] > us[i - 1]))
                throw ValidationError("tabulated utility: U must be strictly increasing");
            if (!(uprimes[i] < uprimes[i - 1]))
                throw ValidationError("tabulated utility: marginal must be strictly decreasing");
        }
    }
    MonotoneCubic u_interp(xs, us);
    // (U', x) pairs, ascending in U': reverse the rows.
    std::vector<double> ys_rev(uprimes.rbegin(), uprimes.rend());
    std::vector<double> xs_rev(xs.rbegin(), xs.rend());
    MonotoneCubic i_interp(ys_rev, xs_rev);
    const double y_min = uprimes.back(), y_max = uprimes.front();
    const double x_min = xs.front(), x_max = xs.back();

    Utility spec;
    spec.name = "custom:" + name;
    spec.u = [u_interp](double x) {
        return x > 0 ? u_interp(x) : -std::numeric_limits<double>::infinity();
    };
    spec.inverse_marginal = [i_interp, y_min, y_max, x_min, x_max](double y) {
        if (y <= y_min) return x_max;
        if (y >= y_max) return x_min;
        return i_interp(y);
    };
    return spec;
}

struct UtilityValidation {
    double max_roundtrip_error = 0; // max over grid of |I(U'(x))/x - 1|
    double marginal_lo = 0;         // U' at the smallest grid point
    double marginal_hi = 0;         // U' at the largest grid point
};

namespace detail {

inline double marginal_or_central(const Utility& spec, double x) {
    if (spec.uprime) return spec.uprime(x);
    const double h = x * 1e-6;
    return (spec.U(x + h) - spec.U(x - h)) / (2 * h);
}

} // namespace detail

/**
 * Checks the utility contract on a grid: strictly increasing, strictly
 * concave (secant slopes strictly decreasing), marginal exploding toward the
 * small end and vanishing toward the large end of the grid (each by at least
 * a factor 4 against the grid midpoint), and I(U'(x)) = x within
 * roundtrip_tol relative. Throws ValidationError on any violation.
 */
inline UtilityValidation validate_utility(const Utility& spec, const std::vector<double>& grid,
                                          double roundtrip_tol = 1e-10) {
    if (grid.size() < 5) throw ValidationError("utility validation grid needs >= 5 points");
    UtilityValidation result;
    double prev_secant = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(grid[i] > 0) || !(grid[i + 1] > grid[i]))
            throw ValidationError("utility validation grid must be positive and increasing");
        const double secant = (spec.U(grid[i + 1]) - spec.U(grid[i])) / (grid[i + 1] - grid[i]);
        if (!(secant > 0)) throw ValidationError("utility is not strictly increasing on the grid");
        if (!(secant < prev_secant))
            throw ValidationError("utility is not strictly concave on the grid");
        prev_secant = secant;
    }
    result.marginal_lo = detail::marginal_or_central(spec, grid.front());
    result.marginal_hi = detail::marginal_or_central(spec, grid.back());
    const double marginal_mid = detail::marginal_or_central(spec, grid[grid.size() / 2]);
    if (!(result.marginal_lo > 4 * marginal_mid) || !(result.marginal_hi < marginal_mid / 4)) {
        throw ValidationError(
            "marginal utility does not steepen/flatten toward the grid extremes "
            "(Inada behavior not visible on this grid)");
    }
    for (double x : grid) {
        const double back = spec.I(detail::marginal_or_central(spec, x));
        const double err = std::abs(back / x - 1.0);
        result.max_roundtrip_error = std::max(result.max_roundtrip_error, err);
    }
    if (result.max_roundtrip_error > roundtrip_tol) {
        throw ValidationError("I(U'(x)) deviates from x by " +
                              std::to_string(result.max_roundtrip_error) + " relative");
    }
    return result;
}

struct DualityReport {
    double max_argmax_deviation = 0; // |argmax - I(y)|, absolute for I <= 1, relative above
    double max_value_deviation = 0;  // |max(U(x)-xy) - (U(I(y)) - I(y) y)|
};

/**
 * Verifies that the conjugate supremum sup_x (U(x) - x y) is attained at
 * x = I(y): golden-section search over a bracket around I(y) must land within
 * 1e-8 of it for every y on the grid.
 */
inline DualityReport duality_check(const Utility& spec, const std::vector<double>& y_grid) {
    DualityReport report;
    const double golden = 0.61803398874989484820458683436564;
    for (double y : y_grid) {
        if (!(y > 0)) throw ValidationError("duality grid must be strictly positive");
        const double center = spec.I(y);
        double a = center / 64, b = center * 64;
        auto g = [&](double x) { return spec.U(x) - x * y; };
        double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
        double g1 = g(x1), g2 = g(x2);
        while (b - a > 1e-12 * std::max(1.0, b)) {
            if (g1 < g2) {
                a = x1;
                x1 = x2;
                g1 = g2;
                x2 = a + golden * (b - a);
                g2 = g(x2);
            } else {
                b = x2;
                x2 = x1;
                g2 = g1;
                x1 = b - golden * (b - a);
                g1 = g(x1);
            }
        }
        const double argmax = 0.5 * (a + b);
        const double arg_dev = std::abs(argmax - center) / std::max(1.0, center);
        const double val_dev = std::abs(g(argmax) - (spec.U(center) - center * y));
        report.max_argmax_deviation = std::max(report.max_argmax_deviation, arg_dev);
        report.max_value_deviation = std::max(report.max_value_deviation, val_dev);
    }
    return report;
}

} // namespace weakinfo

#endif
