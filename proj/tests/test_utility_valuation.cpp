#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "weakinfo/weakinfo.hpp"

using namespace weakinfo;

namespace {

std::vector<double> geometric_grid(double lo, double hi, int count) {
    std::vector<double> grid(count);
    for (int i = 0; i < count; ++i)
        grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    return grid;
}

double kl_divergence(const std::vector<double>& nu, const std::vector<double>& ref) {
    double total = 0;
    for (std::size_t i = 0; i < nu.size(); ++i)
        if (nu[i] > 0) total += nu[i] * std::log(nu[i] / ref[i]);
    return total;
}

} // namespace

TEST_CASE("log and power utilities satisfy their own algebra") {
    const auto log_u = log_utility();
    CHECK(log_u.U(std::exp(1.0)) == Catch::Approx(1.0));
    CHECK(log_u.I(0.25) == Catch::Approx(4.0));
    CHECK(log_u.U(0.0) == -std::numeric_limits<double>::infinity());

    const auto pow_u = power_utility(0.5);
    CHECK(pow_u.U(4.0) == Catch::Approx(4.0)); // 4^0.5 / 0.5
    CHECK(pow_u.uprime(4.0) == Catch::Approx(0.5));
    CHECK(pow_u.I(0.5) == Catch::Approx(4.0));

    for (double x : {0.2, 1.0, 3.7, 20.0}) {
        CHECK(log_u.I(log_u.uprime(x)) == Catch::Approx(x).epsilon(1e-14));
        CHECK(pow_u.I(pow_u.uprime(x)) == Catch::Approx(x).epsilon(1e-13));
    }

    CHECK_THROWS_AS(power_utility(0.0), ValidationError);
    CHECK_THROWS_AS(power_utility(1.0), ValidationError);
    CHECK_THROWS_AS(power_utility(1.5), ValidationError);
}

TEST_CASE("utility validation accepts the standard families and rejects junk") {
    const auto grid = geometric_grid(0.01, 100.0, 25);
    const auto log_report = validate_utility(log_utility(), grid);
    CHECK(log_report.max_roundtrip_error <= 1e-12);
    CHECK(log_report.marginal_lo == Catch::Approx(100.0).epsilon(1e-6));
    const auto pow_report = validate_utility(power_utility(0.3), grid);
    CHECK(pow_report.max_roundtrip_error <= 1e-10);

    // Convex and increasing: concavity check must fire.
    const auto convex = custom_utility(
        "square", [](double x) { return x * x; }, [](double y) { return y / 2; },
        [](double x) { return 2 * x; });
    CHECK_THROWS_AS(validate_utility(convex, grid), ValidationError);

    CHECK_THROWS_AS(validate_utility(log_utility(), {1.0, 2.0, 3.0}), ValidationError);
    CHECK_THROWS_AS(validate_utility(log_utility(), {1.0, 2.0, 3.0, 2.5, 4.0}), ValidationError);
}

TEST_CASE("conjugate duality holds on a grid of multipliers") {
    const auto y_grid = geometric_grid(0.1, 10.0, 9);
    for (const auto& spec : {log_utility(), power_utility(0.5), power_utility(0.8)}) {
        const auto report = duality_check(spec, y_grid);
        CHECK(report.max_argmax_deviation <= 1e-6);
        CHECK(report.max_value_deviation <= 1e-10);
    }
    CHECK_THROWS_AS(duality_check(log_utility(), {0.5, -1.0}), ValidationError);
}

TEST_CASE("monotone cubic interpolation: knots, monotonicity, linear tails") {
    const std::vector<double> xs{0.0, 1.0, 2.0, 4.0};
    const std::vector<double> ys{0.0, 1.0, 1.5, 2.0};
    const MonotoneCubic f(xs, ys);

    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(f(xs[i]) == Catch::Approx(ys[i]));

    double prev = f(0.0);
    for (double x = 0.01; x <= 4.0; x += 0.01) {
        const double cur = f(x);
        CHECK(cur >= prev - 1e-14);
        prev = cur;
    }

    // Beyond the knots the extension is a straight line.
    CHECK(f(-2.0) - f(-1.0) == Catch::Approx(f(-1.0) - f(0.0)).margin(1e-12));
    CHECK(f(6.0) - f(5.0) == Catch::Approx(f(5.0) - f(4.0)).margin(1e-12));

    CHECK_THROWS_AS(MonotoneCubic({1.0, 1.0, 2.0}, {0.0, 1.0, 2.0}), ValidationError);
}

TEST_CASE("tabulated utility reproduces the generating log utility") {
    const auto xs = geometric_grid(0.005, 200.0, 241);
    std::vector<double> us(xs.size()), uprimes(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        us[i] = std::log(xs[i]);
        uprimes[i] = 1.0 / xs[i];
    }
    const auto tab = tabulated_utility(xs, us, uprimes, "logtable");
    CHECK(tab.name == "custom:logtable");

    const auto report = validate_utility(tab, geometric_grid(0.01, 100.0, 21), 1e-3);
    CHECK(report.max_roundtrip_error <= 1e-3);

    // Outside the tabulated marginal range, I clamps to the boundary wealths.
    CHECK(tab.I(1e9) == xs.front());
    CHECK(tab.I(1e-9) == xs.back());

    // Valuation through the table lands close to the exact log answer.
    const auto economy = build_economy<double>(2, {1.5, 0.5}, 0.0, 1.0);
    const auto nu = make_terminal_law<double>(2, 2, {0.5, 1.0 / 3.0, 1.0 / 6.0});
    const auto exact = value_discrete(economy, nu, log_utility(), 1.0);
    const auto tabulated = value_discrete(economy, nu, tab, 1.0);
    CHECK(tabulated.value == Catch::Approx(exact.value).margin(1e-5));
    CHECK(std::abs(tabulated.budget_residual) <= 1e-12);

    // A budget beyond the tabulated wealth range cannot be bracketed.
    CHECK_THROWS_AS(value_discrete(economy, nu, tab, 1000.0), BracketFailure);

    CHECK_THROWS_AS(tabulated_utility({1.0, 2.0}, {0.0, 1.0}, {1.0, 0.5}), ValidationError);
    CHECK_THROWS_AS(tabulated_utility({1.0, 2.0, 3.0}, {0.0, 1.0, 0.5}, {1.0, 0.5, 0.25}),
                    ValidationError);
    CHECK_THROWS_AS(tabulated_utility({1.0, 2.0, 3.0}, {0.0, 1.0, 2.0}, {1.0, 1.5, 2.0}),
                    ValidationError);
}

TEST_CASE("one-period value: closed form, multiplier, wealth profile") {
    const auto economy = build_economy<double>(1, {1.5, 0.5}, 0.0, 1.0);
    const auto nu = make_terminal_law<double>(1, 2, {2.0 / 3.0, 1.0 / 3.0});
    const auto result = value_discrete(economy, nu, log_utility(), 1.0);
    CHECK(result.value == Catch::Approx(0.0566330122651325).margin(1e-14));
    CHECK(result.lambda == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(result.terminal_wealth[0] == Catch::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(result.terminal_wealth[1] == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(result.budget_residual) <= 1e-13);
}

TEST_CASE("log value equals discounted-wealth log plus relative entropy") {
    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        const auto economy = build_economy<double>(
            4, {2.0, 1.0, 0.5}, 0.1, 1.0, std::vector<double>{0.3, 0.3, 0.4});
        const auto nu = oracles::random_equivalent_law(4, 3, rng);
        const double x = 0.5 + rng.uniform01() * 3.0;
        const auto result = value_discrete(economy, nu, log_utility(), x);
        const auto reference = risk_neutral_class_mass(economy);
        const double expected = std::log(x * std::pow(1.1, 4)) + kl_divergence(nu.mass, reference);
        CHECK(result.value == Catch::Approx(expected).epsilon(1e-10));
        CHECK(result.lambda == Catch::Approx(std::pow(1.1, -4) / x).epsilon(1e-10));
        CHECK(std::abs(result.budget_residual) <= 1e-12 * x);
        for (double w : result.terminal_wealth) CHECK(w > 0);
    }
}

TEST_CASE("power value matches its closed form") {
    Rng rng(32);
    for (double alpha : {0.3, 0.5, 0.8}) {
        const auto economy = build_economy<double>(3, {1.6, 0.6}, 0.07, 1.0);
        const auto nu = oracles::random_equivalent_law(3, 2, rng);
        const double x = 1.4;
        const auto result = value_discrete(economy, nu, power_utility(alpha), x);

        const auto reference = risk_neutral_class_mass(economy);
        const double grown = x * std::pow(1.07, 3);
        double m_sum = 0;
        for (std::size_t c = 0; c < reference.size(); ++c) {
            const double xi = nu.mass[c] / reference[c];
            m_sum += std::pow(xi, 1.0 / (1.0 - alpha)) * reference[c];
        }
        const double expected =
            std::pow(grown, alpha) / alpha * std::pow(m_sum, 1.0 - alpha);
        CHECK(result.value == Catch::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("anticipating the reference law is worth exactly the utility of wealth") {
    Rng rng(33);
    const auto economy = build_economy<double>(
        5, {2.0, 1.0, 0.5}, 0.0, 1.0, std::vector<double>{0.25, 0.25, 0.5});
    const auto reference = risk_neutral_class_mass(economy);
    const auto nu = make_terminal_law<double>(5, 3, reference);
    for (double x : {0.5, 1.0, 2.5}) {
        CHECK(value_discrete(economy, nu, log_utility(), x).value ==
              Catch::Approx(std::log(x)).margin(1e-12));
        CHECK(value_discrete(economy, nu, power_utility(0.5), x).value ==
              Catch::Approx(2.0 * std::sqrt(x)).epsilon(1e-12));
    }
    // With interest the benchmark is the utility of fully grown wealth.
    const auto grown_economy = build_economy<double>(
        5, {2.0, 1.0, 0.5}, 0.04, 1.0,
        std::vector<double>{0.30, 0.18, 0.52}); // drift 1.04: 0.30*2 + 0.18 + 0.52/2
    const auto grown_ref = risk_neutral_class_mass(grown_economy);
    const auto grown_nu = make_terminal_law<double>(5, 3, grown_ref);
    const double x = 1.3;
    CHECK(value_discrete(grown_economy, grown_nu, log_utility(), x).value ==
          Catch::Approx(std::log(x * std::pow(1.04, 5))).epsilon(1e-12));
}

TEST_CASE("direct strategy maximization reaches the same value") {
    Rng rng(34);
    const auto economy = build_economy<double>(2, {1.5, 0.5}, 0.0, 1.0);
    for (const auto& utility : {log_utility(), power_utility(0.5)}) {
        const auto nu = oracles::random_equivalent_law(2, 2, rng);
        const double closed = value_discrete(economy, nu, utility, 1.0).value;
        const double searched = oracles::strategy_maximization_value(economy, nu, utility, 1.0);
        CHECK(searched == Catch::Approx(closed).margin(1e-6));
        CHECK(searched <= closed + 1e-9); // maximization cannot beat the optimum
    }
}

TEST_CASE("valuation guards: shape, equivalence, positivity") {
    const auto economy = build_economy<double>(2, {1.5, 0.5}, 0.0, 1.0);
    const auto nu_gap = make_terminal_law<double>(2, 2, {0.5, 0.5, 0.0});
    CHECK_THROWS_AS(value_discrete(economy, nu_gap, log_utility(), 1.0), NotEquivalent);
    const auto nu3 = make_terminal_law<double>(3, 2, {0.25, 0.25, 0.25, 0.25});
    CHECK_THROWS_AS(value_discrete(economy, nu3, log_utility(), 1.0), ClassMismatch);
    const auto nu = make_terminal_law<double>(2, 2, {0.25, 0.5, 0.25});
    CHECK_THROWS_AS(value_discrete(economy, nu, log_utility(), 0.0), ValidationError);
    CHECK_THROWS_AS(value_discrete(economy, nu, log_utility(), -2.0), ValidationError);
    CHECK_THROWS_AS(value_from_classes(log_utility(), {1.0, 2.0}, {0.5, 0.5, 0.0}, 1.0, 1.0),
                    ValidationError);
}

TEST_CASE("continuous value with flat density is the utility of wealth") {
    auto flat = [](double) { return 1.0; };
    const auto log_result = value_continuous(flat, 0.0, 1.0, log_utility(), 2.0);
    CHECK(log_result.value == Catch::Approx(std::log(2.0)).margin(1e-12));
    CHECK(log_result.lambda == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(log_result.quadrature_nodes >= 32);

    const auto pow_result = value_continuous(flat, 0.0, 1.0, power_utility(0.3), 1.7);
    CHECK(pow_result.value ==
          Catch::Approx(std::pow(1.7, 0.3) / 0.3).epsilon(1e-12));
}

TEST_CASE("tilted density: closed-form continuous values") {
    const auto family = tilted_anticipation(0.5);
    const auto log_result = value_continuous(family.xi, 0.0, 1.0, log_utility(), 1.0);
    CHECK(log_result.value == Catch::Approx(0.125).margin(1e-9));

    const auto pow_result = value_continuous(family.xi, 0.0, 1.0, power_utility(0.5), 1.0);
    CHECK(pow_result.value == Catch::Approx(2.2662969061336526).margin(1e-9));

    // Negative density anywhere on the support is rejected.
    auto signed_density = [](double y) { return y; };
    CHECK_THROWS_AS(value_continuous(signed_density, 0.0, 1.0, log_utility(), 1.0),
                    ValidationError);
}

TEST_CASE("optimal wealth process is a discounted martingale from x") {
    Rng rng(35);
    const auto economy = build_economy<double>(5, {1.5, 0.5}, 0.05, 1.0);
    for (const auto& utility : {log_utility(), power_utility(0.5)}) {
        const auto nu = oracles::random_equivalent_law(5, 2, rng);
        const auto wealth = optimal_wealth_process(economy, nu, utility, 1.0);
        CHECK(std::abs(wealth.initial_residual) <= 1e-12);
        CHECK(martingale_residual(economy, wealth) <= 1e-12);
        for (const auto& level : wealth.node_value)
            for (double v : level) CHECK(v > 0);

        const auto hedge = hedge_strategy(economy, wealth);
        CHECK(replication_error(economy, wealth, hedge, 1.0) <= 1e-12);
    }
}

TEST_CASE("one-period hedge holds two thirds of a share") {
    const auto economy = build_economy<double>(1, {1.5, 0.5}, 0.0, 1.0);
    const auto nu = make_terminal_law<double>(1, 2, {2.0 / 3.0, 1.0 / 3.0});
    const auto wealth = optimal_wealth_process(economy, nu, log_utility(), 1.0);
    const auto hedge = hedge_strategy(economy, wealth);
    CHECK(hedge.risky_shares[0][0] == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(hedge.bond_value[0][0] == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("replication is only defined on binomial lattices") {
    const auto economy = build_economy<double>(
        2, {2.0, 1.0, 0.5}, 0.0, 1.0, std::vector<double>{0.25, 0.25, 0.5});
    const auto nu = make_terminal_law<double>(
        2, 3, {0.1, 0.2, 0.2, 0.2, 0.2, 0.1});
    const auto wealth = optimal_wealth_process(economy, nu, log_utility(), 1.0);
    CHECK(martingale_residual(economy, wealth) <= 1e-12);
    CHECK_THROWS_AS(hedge_strategy(economy, wealth), IncompleteMarket);
}
