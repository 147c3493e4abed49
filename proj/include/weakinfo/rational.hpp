#ifndef WEAKINFO_RATIONAL_HPP
#define WEAKINFO_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "weakinfo/errors.hpp"

namespace weakinfo {

/// Exact arithmetic scalar used by the oracle-grade ("rational") backend.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

namespace detail {

/// Strict base-10 integer parse. cpp_int's own string constructor follows
/// C++ literal rules, where a leading zero switches the base to octal --
/// unacceptable for user-facing literals like "0.25" (whose digit string
/// "025" must mean twenty-five).
inline Rational decimal_integer(const std::string& text) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        negative = text[pos] == '-';
        ++pos;
    }
    if (pos == text.size()) throw std::invalid_argument("empty integer literal");
    Rational value = 0;
    for (; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (c < '0' || c > '9') throw std::invalid_argument("not a decimal digit");
        value = value * 10 + (c - '0');
    }
    return negative ? -value : value;
}

} // namespace detail

/// Parses "p/q", a decimal, or an integer into an exact rational.
/// Decimals become exact fractions (e.g. "0.25" -> 1/4). The optional context
/// prefixes error messages with where the literal came from.
inline Rational rational_from_string(const std::string& text, const std::string& context = {}) {
    const std::string where = context.empty() ? std::string() : context + ": ";
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            const Rational num = detail::decimal_integer(text.substr(0, slash));
            const Rational den = detail::decimal_integer(text.substr(slash + 1));
            if (den == 0)
                throw ConfigError(where + "rational literal has zero denominator: " + text);
            return num / den;
        }
        const auto dot = text.find('.');
        if (dot == std::string::npos) return detail::decimal_integer(text);
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        const std::size_t frac_len = text.size() - dot - 1;
        Rational den = 1;
        for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
        return detail::decimal_integer(digits) / den;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError(where + "cannot parse rational literal: " + text);
    }
}

/**
 * Multinomial coefficient m! / (j_1! ... j_k!) with m = sum(j) in the scalar
 * type S, computed as a product of binomial coefficients so that every
 * intermediate is itself a coefficient (exact for S = Rational, overflow-free
 * for S = double while the value fits).
 */
template <typename S>
S multinomial_coefficient(const std::vector<int>& counts) {
    S result = 1;
    long long seen = 0;
    for (int j : counts) {
        for (long long i = 1; i <= j; ++i) {
            result = result * S(seen + i) / S(i);
        }
        seen += j;
    }
    return result;
}

/// log of the multinomial coefficient, usable far beyond double overflow.
inline double log_multinomial(const std::vector<int>& counts) {
    double m = 0, s = 0;
    for (int j : counts) {
        m += j;
        s += std::lgamma(static_cast<double>(j) + 1.0);
    }
    return std::lgamma(m + 1.0) - s;
}

} // namespace weakinfo

#endif
