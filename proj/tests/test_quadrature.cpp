#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "weakinfo/weakinfo.hpp"

using namespace weakinfo;

namespace {
constexpr double kSqrtPi = 1.7724538509055160272981674833411;
}

TEST_CASE("tiny rules are known in closed form") {
    const auto one = gauss_hermite(1);
    REQUIRE(one.nodes.size() == 1);
    CHECK(one.nodes[0] == 0.0);
    CHECK(one.weights[0] == Catch::Approx(kSqrtPi).epsilon(1e-15));

    const auto two = gauss_hermite(2);
    REQUIRE(two.nodes.size() == 2);
    CHECK(two.nodes[0] == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(two.nodes[1] == Catch::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(two.weights[0] == Catch::Approx(kSqrtPi / 2).epsilon(1e-15));
    CHECK(two.weights[1] == Catch::Approx(kSqrtPi / 2).epsilon(1e-15));
}

TEST_CASE("weights sum to sqrt(pi) at every size") {
    for (int m : {4, 16, 64, 128, 512}) {
        const auto rule = gauss_hermite(m);
        REQUIRE(rule.nodes.size() == static_cast<std::size_t>(m));
        double total = 0;
        for (double w : rule.weights) {
            // Extreme tail weights of very large rules underflow cleanly to
            // zero (e^{-x^2} below the denormal range); they must never go
            // negative or non-finite.
            CHECK(w >= 0);
            CHECK(std::isfinite(w));
            if (m <= 128) CHECK(w > 0);
            total += w;
        }
        CHECK(total == Catch::Approx(kSqrtPi).epsilon(1e-13));
    }
}

TEST_CASE("a five-point rule integrates degree-9 polynomials exactly") {
    const auto rule = gauss_hermite(5);
    double x8 = 0, x9 = 0, x6 = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = rule.nodes[i];
        x6 += rule.weights[i] * std::pow(t, 6);
        x8 += rule.weights[i] * std::pow(t, 8);
        x9 += rule.weights[i] * std::pow(t, 9);
    }
    CHECK(x6 == Catch::Approx(15.0 * kSqrtPi / 8.0).epsilon(1e-13));
    CHECK(x8 == Catch::Approx(105.0 * kSqrtPi / 16.0).epsilon(1e-13));
    CHECK(x9 == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("nodes are symmetric, strictly decreasing, odd middle node exactly zero") {
    for (int m : {7, 16, 33, 128}) {
        const auto rule = gauss_hermite(m);
        for (int i = 0; i + 1 < m; ++i) CHECK(rule.nodes[i] > rule.nodes[i + 1]);
        for (int i = 0; i < m; ++i) {
            CHECK(rule.nodes[i] == Catch::Approx(-rule.nodes[m - 1 - i]).margin(1e-14));
            CHECK(std::isfinite(rule.weights[i]));
        }
        if (m % 2 == 1) CHECK(rule.nodes[m / 2] == 0.0);
    }
}

TEST_CASE("gaussian expectations via the rule") {
    const double mean = 0.4, sd = 1.7;
    CHECK(integrate_gaussian([](double) { return 1.0; }, mean, sd, gauss_hermite(16)) ==
          Catch::Approx(1.0).epsilon(1e-14));
    CHECK(integrate_gaussian([](double y) { return y; }, mean, sd, gauss_hermite(16)) ==
          Catch::Approx(mean).margin(1e-13));
    CHECK(integrate_gaussian([&](double y) { return (y - mean) * (y - mean); }, mean, sd, gauss_hermite(16)) ==
          Catch::Approx(sd * sd).epsilon(1e-13));
    CHECK(integrate_gaussian([](double y) { return std::exp(y); }, mean, sd, gauss_hermite(64)) ==
          Catch::Approx(std::exp(mean + sd * sd / 2)).epsilon(1e-12));
}

TEST_CASE("node doubling refines to tolerance and reports its residual") {
    QuadratureOptions options;
    options.tolerance = 1e-12;
    const auto result =
        refine_gaussian([](double y) { return std::exp(std::sin(y)); }, 0.0, 1.0, options);
    CHECK(result.nodes >= 64);
    CHECK(result.residual < 1e-12);
    // Reference value from a dense rule.
    const double dense = integrate_gaussian([](double y) { return std::exp(std::sin(y)); },
                                            0.0, 1.0, gauss_hermite(512));
    CHECK(result.value == Catch::Approx(dense).epsilon(1e-11));
}

TEST_CASE("an impossible tolerance raises divergence, a bad size raises validation") {
    QuadratureOptions impossible;
    impossible.tolerance = 0.0;
    CHECK_THROWS_AS(refine_gaussian([](double y) { return std::exp(std::sin(y)); }, 0.0, 1.0,
                                    impossible),
                    QuadratureDivergence);
    CHECK_THROWS_AS(gauss_hermite(0), ValidationError);
    CHECK_THROWS_AS(gauss_hermite(-3), ValidationError);
}
