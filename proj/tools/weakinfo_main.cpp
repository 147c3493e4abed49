// Command-line front end: values weak terminal-law information on
// multinomial lattices, reports transition kernels and diagnostics, and runs
// convergence / random-walk studies. Reports are deterministic for a fixed
// seed and independent of --threads.

#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "weakinfo/weakinfo.hpp"

namespace {

using namespace weakinfo;

struct CommonOptions {
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string arithmetic = "double";
    bool timings = false;
    std::uint64_t path_cap = kDefaultPathCap;
};

void add_common_options(CLI::App* sub, CommonOptions& common, bool allow_rational = false) {
    sub->add_option("--out", common.out, "Write the report here instead of stdout");
    sub->add_option("--format", common.format, "Report format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", common.seed, "Seed for randomized diagnostics");
    sub->add_option("--threads", common.threads,
                    "Worker threads (0 = hardware); never changes results");
    if (allow_rational) {
        sub->add_option("--arithmetic", common.arithmetic,
                        "Numeric backend: double or rational (exact)")
            ->check(CLI::IsMember({"double", "rational"}));
    }
    sub->add_option("--path-cap", common.path_cap,
                    "Budget on enumerated path steps before refusing");
}

std::string rational_cell(const Rational& value) {
    return boost::multiprecision::numerator(value).str() + "/" +
           boost::multiprecision::denominator(value).str();
}

std::string render_int_list(const std::vector<int>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(values[i]);
    }
    return out + "]";
}

std::string render_double_list(const std::vector<double>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += format_float(values[i]);
    }
    return out + "]";
}

template <typename S>
struct Problem {
    MultinomialEconomy<S> economy;
    TerminalLaw<S> nu;
};

template <typename S>
Problem<S> load_problem(const std::string& economy_path, const std::string& nu_path,
                        ReportMeta& meta) {
    const ConfigFile econ_config = ConfigFile::parse_file(economy_path);
    meta.files.emplace_back(economy_path, econ_config.raw());
    MultinomialEconomy<S> economy = economy_from_config<S>(econ_config);
    const std::string nu_raw = read_text_file(nu_path);
    meta.files.emplace_back(nu_path, nu_raw);
    TerminalLaw<S> nu = parse_terminal_law<S>(nu_raw, nu_path, economy.n_periods, economy.k());
    return Problem<S>{std::move(economy), std::move(nu)};
}

Utility load_utility(const std::string& text, ReportMeta& meta) {
    if (text == "log") return log_utility();
    if (text.rfind("power:", 0) == 0) {
        const std::string suffix = text.substr(6);
        try {
            std::size_t used = 0;
            const double alpha = std::stod(suffix, &used);
            if (used != suffix.size()) throw std::invalid_argument(suffix);
            return power_utility(alpha);
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("cannot parse power utility exponent '" + suffix + "'");
        }
    }
    const std::string raw = read_text_file(text);
    meta.files.emplace_back(text, raw);
    return parse_tabulated_utility(raw, text);
}

// ----- value ---------------------------------------------------------------

struct ValueOptions {
    CommonOptions common;
    std::string economy_path, nu_path;
    std::string utility = "log";
    double x = 1.0;
};

void run_value(const ValueOptions& opt) {
    Report report;
    report.meta.subcommand = "value";
    report.meta.options = {{"economy", opt.economy_path},
                           {"nu", opt.nu_path},
                           {"utility", opt.utility},
                           {"x", format_float(opt.x)}};
    const Problem<double> problem =
        load_problem<double>(opt.economy_path, opt.nu_path, report.meta);
    const Utility utility = load_utility(opt.utility, report.meta);
    const ValuationResult result =
        value_discrete(problem.economy, problem.nu, utility, opt.x);
    report.columns = {"u", "lambda", "budget_residual"};
    report.rows.push_back({result.value, result.lambda, result.budget_residual});
    write_report(report, opt.common.format, opt.common.out);
}

// ----- transitions ----------------------------------------------------------

struct TransitionsOptions {
    CommonOptions common;
    std::string economy_path, nu_path;
};

template <typename S>
void run_transitions_typed(const TransitionsOptions& opt, Report& report) {
    const Problem<S> problem = load_problem<S>(opt.economy_path, opt.nu_path, report.meta);
    const WeakInfoMeasure<S> measure =
        minimal_measure(problem.economy, problem.nu, opt.common.path_cap);

    std::size_t aliased_levels = 0;
    for (int m = 0; m <= problem.economy.n_periods; ++m)
        if (!price_aliasing_report(problem.economy, m).empty()) ++aliased_levels;
    report.meta.options.emplace_back("price_aliased_levels", std::to_string(aliased_levels));

    report.columns = {"m", "state", "move", "probability"};
    const int k = problem.economy.k();
    for (int m = 0; m < problem.economy.n_periods; ++m) {
        const auto& level = measure.levels[static_cast<std::size_t>(m)];
        for (std::size_t idx = 0; idx < level.size(); ++idx) {
            if (!(measure.marginals[static_cast<std::size_t>(m)][idx] > S(0))) continue;
            for (int move = 0; move < k; ++move) {
                const S probability =
                    transition_probability(measure, m, level.classes()[idx], move);
                std::vector<Cell> row = {static_cast<std::int64_t>(m),
                                         ClassIndex::format_class(level.classes()[idx]),
                                         static_cast<std::int64_t>(move), std::string()};
                if constexpr (detail::is_rational_v<S>)
                    row[3] = rational_cell(probability);
                else
                    row[3] = probability;
                report.rows.push_back(std::move(row));
            }
        }
    }
}

void run_transitions(const TransitionsOptions& opt) {
    Report report;
    report.meta.subcommand = "transitions";
    report.meta.options = {{"economy", opt.economy_path},
                           {"nu", opt.nu_path},
                           {"arithmetic", opt.common.arithmetic},
                           {"path_cap", std::to_string(opt.common.path_cap)}};
    if (opt.common.arithmetic == "rational")
        run_transitions_typed<Rational>(opt, report);
    else
        run_transitions_typed<double>(opt, report);
    write_report(report, opt.common.format, opt.common.out);
}

// ----- markov ----------------------------------------------------------------

struct MarkovOptions {
    CommonOptions common;
    std::string economy_path, nu_path;
};

template <typename S>
void run_markov_typed(const MarkovOptions& opt, Report& report) {
    const Problem<S> problem = load_problem<S>(opt.economy_path, opt.nu_path, report.meta);
    const WeakInfoMeasure<S> measure =
        minimal_measure(problem.economy, problem.nu, opt.common.path_cap);
    const MarkovReport result = markov_check(measure);
    report.columns = {"max_deviation", "histories_checked"};
    report.rows.push_back(
        {result.max_deviation, static_cast<std::int64_t>(result.histories_checked)});
}

void run_markov(const MarkovOptions& opt) {
    Report report;
    report.meta.subcommand = "markov";
    report.meta.options = {{"economy", opt.economy_path},
                           {"nu", opt.nu_path},
                           {"arithmetic", opt.common.arithmetic},
                           {"path_cap", std::to_string(opt.common.path_cap)}};
    if (opt.common.arithmetic == "rational")
        run_markov_typed<Rational>(opt, report);
    else
        run_markov_typed<double>(opt, report);
    write_report(report, opt.common.format, opt.common.out);
}

// ----- minimality -------------------------------------------------------------

struct MinimalityOptions {
    CommonOptions common;
    std::string economy_path, nu_path;
    std::string phi = "square";
    int trials = 200;
};

template <typename S>
void run_minimality_typed(const MinimalityOptions& opt, Report& report) {
    const Problem<S> problem = load_problem<S>(opt.economy_path, opt.nu_path, report.meta);
    const ConvexPhi phi = opt.phi == "square" ? ConvexPhi::Square : ConvexPhi::XLogX;
    const MinimalityReport result =
        minimality_check(problem.economy, problem.nu, phi, opt.trials, opt.common.seed,
                         resolve_threads(opt.common.threads), opt.common.path_cap);
    report.columns = {"min_gap", "reference_value", "trials"};
    report.rows.push_back({result.min_gap, result.reference_value,
                           static_cast<std::int64_t>(result.trials)});
}

void run_minimality(const MinimalityOptions& opt) {
    Report report;
    report.meta.subcommand = "minimality";
    report.meta.options = {{"economy", opt.economy_path},
                           {"nu", opt.nu_path},
                           {"phi", opt.phi},
                           {"trials", std::to_string(opt.trials)},
                           {"seed", std::to_string(opt.common.seed)},
                           {"arithmetic", opt.common.arithmetic},
                           {"path_cap", std::to_string(opt.common.path_cap)}};
    if (opt.common.arithmetic == "rational")
        run_minimality_typed<Rational>(opt, report);
    else
        run_minimality_typed<double>(opt, report);
    write_report(report, opt.common.format, opt.common.out);
}

// ----- sweep -------------------------------------------------------------------

struct SweepOptions {
    CommonOptions common;
    std::string walk = "binomial";
    std::vector<int> n_list = {64, 128, 256, 512, 1024, 2048, 4096};
    std::string xi = "tilt:0.5:60";
    std::string utility = "log";
    double x = 1.0;
};

int parse_walk_level(const std::string& walk) {
    if (walk == "binomial") return 2;
    if (walk == "trinomial") return 3;
    if (walk.rfind("multinomial:", 0) == 0) {
        const std::string suffix = walk.substr(12);
        try {
            std::size_t used = 0;
            const int level = std::stoi(suffix, &used);
            if (used != suffix.size()) throw std::invalid_argument(suffix);
            return level;
        } catch (const std::exception&) {
            throw ConfigError("cannot parse walk level in '" + walk + "'");
        }
    }
    throw ConfigError("unknown walk '" + walk +
                      "' (expected binomial, trinomial, or multinomial:<level>)");
}

AnticipationFamily parse_anticipation(const std::string& text, double law_sd) {
    if (text == "uniform") return uniform_anticipation(0.0, law_sd);
    if (text.rfind("tilt:", 0) == 0) {
        std::string body = text.substr(5);
        double theta = 0, cap = 60.0;
        const std::size_t colon = body.find(':');
        try {
            if (colon == std::string::npos) {
                theta = std::stod(body);
            } else {
                theta = std::stod(body.substr(0, colon));
                cap = std::stod(body.substr(colon + 1));
            }
        } catch (const std::exception&) {
            throw ConfigError("cannot parse anticipation '" + text + "'");
        }
        return tilted_anticipation(theta, cap, 0.0, law_sd);
    }
    throw ConfigError("unknown anticipation '" + text +
                      "' (expected uniform or tilt:<theta>[:<cap>])");
}

void run_sweep(const SweepOptions& opt) {
    Report report;
    report.meta.subcommand = "sweep";
    report.meta.options = {{"walk", opt.walk},
                           {"n", render_int_list(opt.n_list)},
                           {"xi", opt.xi},
                           {"utility", opt.utility},
                           {"x", format_float(opt.x)},
                           {"timings", opt.common.timings ? "true" : "false"}};
    const int level = parse_walk_level(opt.walk);
    const AnticipationFamily family = parse_anticipation(opt.xi, limit_sd_for_level(level));
    const Utility utility = load_utility(opt.utility, report.meta);
    const ConvergenceReport sweep = convergence_sweep(family, utility, opt.x, level, opt.n_list);
    report.columns = {"n", "u_discrete", "u_limit", "abs_error", "seconds"};
    for (const SweepRow& row : sweep.rows) {
        report.rows.push_back({static_cast<std::int64_t>(row.n), row.u_discrete, row.u_limit,
                               row.abs_error, opt.common.timings ? row.seconds : 0.0});
    }
    write_report(report, opt.common.format, opt.common.out);
}

// ----- walks ---------------------------------------------------------------------

struct WalksOptions {
    CommonOptions common;
    std::string kind = "binomial";
    double p = 0.5;
    double q = 0.5;
    std::vector<double> probabilities;
    std::vector<int> n_list = {4096};
    std::uint64_t samples = 100000;
    double sigma = 0;
};

WalkSpec parse_walk_spec(const WalksOptions& opt, int steps) {
    WalkSpec spec;
    spec.steps = steps;
    spec.p = opt.p;
    spec.q = opt.q;
    spec.sigma = opt.sigma;
    spec.probabilities = opt.probabilities;
    if (opt.kind == "binomial") {
        spec.kind = WalkKind::Binomial;
    } else if (opt.kind == "bernoulli01") {
        spec.kind = WalkKind::Bernoulli01;
    } else if (opt.kind == "trinomial") {
        spec.kind = WalkKind::Trinomial;
    } else if (opt.kind.rfind("multinomial:", 0) == 0) {
        spec.kind = WalkKind::Multinomial;
        const std::string suffix = opt.kind.substr(12);
        try {
            std::size_t used = 0;
            spec.level = std::stoi(suffix, &used);
            if (used != suffix.size()) throw std::invalid_argument(suffix);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse walk level in '" + opt.kind + "'");
        }
    } else {
        throw ConfigError("unknown walk kind '" + opt.kind +
                          "' (expected binomial, bernoulli01, trinomial, or multinomial:<level>)");
    }
    return spec;
}

void run_walks(const WalksOptions& opt) {
    Report report;
    report.meta.subcommand = "walks";
    report.meta.options = {{"kind", opt.kind},
                           {"n", render_int_list(opt.n_list)},
                           {"samples", std::to_string(opt.samples)},
                           {"seed", std::to_string(opt.common.seed)},
                           {"p", format_float(opt.p)},
                           {"q", format_float(opt.q)},
                           {"sigma", format_float(opt.sigma)}};
    if (!opt.probabilities.empty())
        report.meta.options.emplace_back("probs", render_double_list(opt.probabilities));

    report.columns = {"kind", "n", "samples", "seed", "mean", "var", "ks", "charfn_gap"};
    bool any_degenerate = false;
    for (int n : opt.n_list) {
        const WalkSpec spec = parse_walk_spec(opt, n);
        const LimitSpec limit = limit_spec(spec);
        const EndpointSample sample =
            simulate_endpoint(spec, opt.samples, opt.common.seed, opt.common.threads);
        any_degenerate = any_degenerate || sample.degenerate;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const double ks = sample.degenerate ? nan : ks_distance(sample.z, limit);
        const double gap = sample.degenerate ? nan : char_fn_distance(sample.z, limit);
        report.rows.push_back({walk_kind_name(spec), static_cast<std::int64_t>(n),
                               static_cast<std::int64_t>(opt.samples),
                               static_cast<std::int64_t>(opt.common.seed), sample.mean,
                               sample.variance, ks, gap});
    }
    if (any_degenerate) report.meta.options.emplace_back("degenerate", "true");
    write_report(report, opt.common.format, opt.common.out);
}

// ----- hedge ------------------------------------------------------------------------

struct HedgeOptions {
    CommonOptions common;
    std::string economy_path, nu_path;
    std::string utility = "log";
    double x = 1.0;
};

void run_hedge(const HedgeOptions& opt) {
    Report report;
    report.meta.subcommand = "hedge";
    report.meta.options = {{"economy", opt.economy_path},
                           {"nu", opt.nu_path},
                           {"utility", opt.utility},
                           {"x", format_float(opt.x)}};
    const Problem<double> problem =
        load_problem<double>(opt.economy_path, opt.nu_path, report.meta);
    const Utility utility = load_utility(opt.utility, report.meta);
    const ValuationResult valuation =
        value_discrete(problem.economy, problem.nu, utility, opt.x);
    const WealthProcess wealth =
        optimal_wealth_process(problem.economy, problem.nu, utility, opt.x);
    const HedgeStrategy hedge = hedge_strategy(problem.economy, wealth);

    report.meta.options.emplace_back("u", format_float(valuation.value));
    report.meta.options.emplace_back("lambda", format_float(valuation.lambda));
    report.meta.options.emplace_back("martingale_residual",
                                     format_float(martingale_residual(problem.economy, wealth)));
    report.meta.options.emplace_back("replication_error",
                                     format_float(replication_error(problem.economy, wealth,
                                                                    hedge, opt.x)));

    report.columns = {"m", "state", "wealth", "shares", "bond"};
    for (int m = 0; m < problem.economy.n_periods; ++m) {
        const ClassIndex level(m, problem.economy.k());
        for (std::size_t idx = 0; idx < level.size(); ++idx) {
            report.rows.push_back({static_cast<std::int64_t>(m),
                                   ClassIndex::format_class(level.classes()[idx]),
                                   wealth.node_value[static_cast<std::size_t>(m)][idx],
                                   hedge.risky_shares[static_cast<std::size_t>(m)][idx],
                                   hedge.bond_value[static_cast<std::size_t>(m)][idx]});
        }
    }
    write_report(report, opt.common.format, opt.common.out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weak terminal-law information on multinomial lattices"};
    app.require_subcommand(1);

    ValueOptions value_opt;
    CLI::App* value_cmd = app.add_subcommand("value", "Optimal expected utility of an insider");
    value_cmd->add_option("--economy", value_opt.economy_path, "Economy config file")->required();
    value_cmd->add_option("--nu", value_opt.nu_path, "Terminal law file")->required();
    value_cmd->add_option("--utility", value_opt.utility,
                          "log, power:<alpha>, or a tabulated utility file");
    value_cmd->add_option("--x", value_opt.x, "Initial capital");
    add_common_options(value_cmd, value_opt.common);
    value_cmd->callback([&value_opt] { run_value(value_opt); });

    TransitionsOptions transitions_opt;
    CLI::App* transitions_cmd =
        app.add_subcommand("transitions", "Transition kernel of the minimal measure");
    transitions_cmd->add_option("--economy", transitions_opt.economy_path, "Economy config file")
        ->required();
    transitions_cmd->add_option("--nu", transitions_opt.nu_path, "Terminal law file")->required();
    add_common_options(transitions_cmd, transitions_opt.common, true);
    transitions_cmd->callback([&transitions_opt] { run_transitions(transitions_opt); });

    MarkovOptions markov_opt;
    CLI::App* markov_cmd =
        app.add_subcommand("markov", "Exhaustive Markov property check of the minimal measure");
    markov_cmd->add_option("--economy", markov_opt.economy_path, "Economy config file")
        ->required();
    markov_cmd->add_option("--nu", markov_opt.nu_path, "Terminal law file")->required();
    add_common_options(markov_cmd, markov_opt.common, true);
    markov_cmd->callback([&markov_opt] { run_markov(markov_opt); });

    MinimalityOptions minimality_opt;
    CLI::App* minimality_cmd = app.add_subcommand(
        "minimality", "Divergence gap of the minimal measure over random equivalent measures");
    minimality_cmd->add_option("--economy", minimality_opt.economy_path, "Economy config file")
        ->required();
    minimality_cmd->add_option("--nu", minimality_opt.nu_path, "Terminal law file")->required();
    minimality_cmd->add_option("--phi", minimality_opt.phi, "Convex divergence: square or xlogx")
        ->check(CLI::IsMember({"square", "xlogx"}));
    minimality_cmd->add_option("--trials", minimality_opt.trials, "Random comparison measures");
    add_common_options(minimality_cmd, minimality_opt.common, true);
    minimality_cmd->callback([&minimality_opt] { run_minimality(minimality_opt); });

    SweepOptions sweep_opt;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Lattice information values against the Gaussian limit");
    sweep_cmd->add_option("--walk", sweep_opt.walk,
                          "binomial, trinomial, or multinomial:<level>");
    sweep_cmd->add_option("--n", sweep_opt.n_list, "Lattice sizes (comma separated, increasing)")
        ->delimiter(',');
    sweep_cmd->add_option("--xi", sweep_opt.xi, "Anticipation: uniform or tilt:<theta>[:<cap>]");
    sweep_cmd->add_option("--utility", sweep_opt.utility,
                          "log, power:<alpha>, or a tabulated utility file");
    sweep_cmd->add_option("--x", sweep_opt.x, "Initial capital");
    sweep_cmd->add_flag("--timings", sweep_opt.common.timings,
                        "Report wall-clock seconds (off keeps reports byte-stable)");
    add_common_options(sweep_cmd, sweep_opt.common);
    sweep_cmd->callback([&sweep_opt] { run_sweep(sweep_opt); });

    WalksOptions walks_opt;
    CLI::App* walks_cmd =
        app.add_subcommand("walks", "Monte Carlo endpoint diagnostics for scaled random walks");
    walks_cmd->add_option("--kind", walks_opt.kind,
                          "binomial, bernoulli01, trinomial, or multinomial:<level>");
    walks_cmd->add_option("--p", walks_opt.p, "Success probability (first component)");
    walks_cmd->add_option("--q", walks_opt.q, "Second component probability (trinomial)");
    walks_cmd->add_option("--probs", walks_opt.probabilities,
                          "Component probabilities for multinomial walks")
        ->delimiter(',');
    walks_cmd->add_option("--n", walks_opt.n_list, "Steps per walk (comma separated)")
        ->delimiter(',');
    walks_cmd->add_option("--samples", walks_opt.samples, "Monte Carlo sample count");
    walks_cmd->add_option("--sigma", walks_opt.sigma,
                          "Explicit scaling deviation (single-component kinds)");
    add_common_options(walks_cmd, walks_opt.common);
    walks_cmd->callback([&walks_opt] { run_walks(walks_opt); });

    HedgeOptions hedge_opt;
    CLI::App* hedge_cmd =
        app.add_subcommand("hedge", "Optimal wealth process and replicating strategy");
    hedge_cmd->add_option("--economy", hedge_opt.economy_path, "Economy config file")->required();
    hedge_cmd->add_option("--nu", hedge_opt.nu_path, "Terminal law file")->required();
    hedge_cmd->add_option("--utility", hedge_opt.utility,
                          "log, power:<alpha>, or a tabulated utility file");
    hedge_cmd->add_option("--x", hedge_opt.x, "Initial capital");
    add_common_options(hedge_cmd, hedge_opt.common);
    hedge_cmd->callback([&hedge_opt] { run_hedge(hedge_opt); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const weakinfo::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const weakinfo::NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
