#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "weakinfo/weakinfo.hpp"

using namespace weakinfo;

namespace {

const char* kEconomyText =
    "# market shape\n"
    "n = 2            # periods\n"
    "factors = [3/2, 1/2]\n"
    "rate = 0\n";

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

} // namespace

TEST_CASE("config files: comments, fractions, lists, ordered entries") {
    const auto config = ConfigFile::parse(kEconomyText, "economy.cfg");
    CHECK(config.origin() == "economy.cfg");
    CHECK(config.get_int("n") == 2);
    CHECK(config.get_double("rate") == 0.0);
    CHECK(config.has("factors"));
    CHECK_FALSE(config.has("initial_price"));

    const auto items = config.get_list("factors");
    REQUIRE(items.size() == 2);
    CHECK(items[0] == "3/2");
    CHECK(items[1] == "1/2");
    const auto factors = config.get_scalar_list<double>("factors");
    CHECK(factors[0] == 1.5);
    CHECK(factors[1] == 0.5);
    const auto exact = config.get_scalar_list<Rational>("factors");
    CHECK(exact[0] == Rational(3, 2));

    REQUIRE(config.entries().size() == 3);
    CHECK(config.entries()[0].first == "n");
    CHECK(config.entries()[1].first == "factors");
    CHECK(config.entries()[2].first == "rate");
}

TEST_CASE("config parse failures carry origin and line number") {
    try {
        ConfigFile::parse("n = 1\nn = 2\n", "dup.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("dup.cfg:2") != std::string::npos);
        CHECK(what.find("duplicate") != std::string::npos);
    }
    try {
        ConfigFile::parse("n = 1\njust words\n", "bad.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bad.cfg:2") != std::string::npos);
    }
    CHECK_THROWS_AS(ConfigFile::parse("= 3\n", "anon.cfg"), ConfigError);

    const auto config = ConfigFile::parse("n = two\nprobs = [0.5, ]\n", "types.cfg");
    try {
        config.get("absent");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("absent") != std::string::npos);
    }
    CHECK_THROWS_AS(config.get_int("n"), ConfigError);
    CHECK_THROWS_AS(config.get_scalar_list<double>("probs"), ConfigError);
    CHECK_THROWS_AS(config.get_scalar<Rational>("n"), ConfigError);
    CHECK_THROWS_AS(config.get_scalar<double>("n"), ConfigError);
}

TEST_CASE("fraction values parse in both arithmetic backends") {
    const auto config = ConfigFile::parse("a = 3/4\nb = 0.25\nc = 1/0\n", "frac.cfg");
    CHECK(config.get_double("a") == 0.75);
    CHECK(config.get_scalar<Rational>("a") == Rational(3, 4));
    CHECK(config.get_scalar<Rational>("b") == Rational(1, 4));
    CHECK_THROWS_AS(config.get_double("c"), ConfigError);
    CHECK_THROWS_AS(config.get_scalar<Rational>("c"), ConfigError);
}

TEST_CASE("economies load from config in both backends") {
    const auto config = ConfigFile::parse(kEconomyText, "economy.cfg");
    const auto economy = economy_from_config<double>(config);
    CHECK(economy.n_periods == 2);
    CHECK(economy.initial_price == 1.0); // default
    CHECK(economy.risk_neutral[0] == Catch::Approx(0.5));

    const auto exact = economy_from_config<Rational>(config);
    CHECK(exact.risk_neutral[0] == Rational(1, 2));
    CHECK(exact.factors[0] == Rational(3, 2));

    const auto priced = ConfigFile::parse(
        "n = 1\nfactors = [2, 1/2]\nrate = 1/10\ninitial_price = 4\n", "p.cfg");
    CHECK(economy_from_config<Rational>(priced).initial_price == Rational(4));
    CHECK(economy_from_config<Rational>(priced).risk_neutral[0] == Rational(2, 5));
}

TEST_CASE("terminal laws parse with comma or space separated tuples") {
    const std::string text =
        "# anticipated terminal classes\n"
        "(2, 0): 1/4\n"
        "(1 1): 1/2\n"
        "(0,2): 1/4\n";
    const auto law = parse_terminal_law<Rational>(text, "nu.txt", 2, 2);
    CHECK(law.mass[0] == Rational(1, 4));
    CHECK(law.mass[1] == Rational(1, 2));
    CHECK(law.mass[2] == Rational(1, 4));
    CHECK(law.equivalent);

    const auto sparse = parse_terminal_law<double>("(2 0): 1\n", "nu.txt", 2, 2);
    CHECK(sparse.mass[0] == 1.0);
    CHECK(sparse.mass[1] == 0.0);
    CHECK_FALSE(sparse.equivalent);
}

TEST_CASE("terminal law rejections") {
    CHECK_THROWS_AS(parse_terminal_law<double>("(3, 0): 1\n", "nu.txt", 2, 2), ClassMismatch);
    CHECK_THROWS_AS(parse_terminal_law<double>("(2 0): 1/2\n(2 0): 1/2\n", "nu.txt", 2, 2),
                    ConfigError);
    CHECK_THROWS_AS(parse_terminal_law<double>("(2 0): 1/2\n", "nu.txt", 2, 2), InvalidMeasure);
    CHECK_THROWS_AS(parse_terminal_law<double>("(2 0) 1\n", "nu.txt", 2, 2), ConfigError);
    CHECK_THROWS_AS(parse_terminal_law<double>("2 0: 1\n", "nu.txt", 2, 2), ConfigError);
    CHECK_THROWS_AS(parse_terminal_law<double>("(2 x): 1\n", "nu.txt", 2, 2), ConfigError);
    CHECK_THROWS_AS(parse_terminal_law<double>("# nothing\n", "nu.txt", 2, 2), ConfigError);
}

TEST_CASE("tabulated utilities parse from x/U/U' rows") {
    const std::string rows =
        "1 0 1\n"
        "2 0.693 0.5\n"
        "4 1.386 0.25   # doubling\n"
        "8 2.079 0.125\n";
    const auto spec = parse_tabulated_utility(rows, "u.txt");
    CHECK(spec.name == "custom:tabulated");
    CHECK(spec.U(2.0) == Catch::Approx(0.693));
    CHECK(spec.I(1.0) == Catch::Approx(1.0));

    CHECK_THROWS_AS(parse_tabulated_utility("1 0 1 junk\n2 1 0.5\n3 2 0.25\n", "u.txt"),
                    ConfigError);
    CHECK_THROWS_AS(parse_tabulated_utility("1 0\n", "u.txt"), ConfigError);
    CHECK_THROWS_AS(parse_tabulated_utility("", "u.txt"), ConfigError);
}

TEST_CASE("text files round-trip and missing paths fail loudly") {
    const auto path = temp_file("weakinfo_cfg_roundtrip.txt", "alpha\nbeta\n");
    CHECK(read_text_file(path.string()) == "alpha\nbeta\n");
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_text_file(path.string()), ConfigError);
    CHECK_THROWS_AS(ConfigFile::parse_file(path.string()), ConfigError);
}

TEST_CASE("float cells pin their decimal rendering") {
    CHECK(format_float(0.5) == "0.5");
    CHECK(format_float(1.0 / 3.0) == "0.33333333333333331");
    CHECK(format_float(-2.0) == "-2");
    CHECK(format_float(1e300) == "1.0000000000000001e+300");
}

TEST_CASE("csv rendering is byte-exact, with quoting and file echoes") {
    Report report;
    report.meta.subcommand = "demo";
    report.meta.options = {{"alpha", "0.5"}, {"mode", "fast"}};
    report.meta.files = {{"nu.txt", "(2,0): 1/2\n(1,1): 1/2\n"}};
    report.columns = {"name", "count", "value"};
    report.rows.push_back({Cell{std::string("plain")}, Cell{std::int64_t{3}}, Cell{0.5}});
    report.rows.push_back(
        {Cell{std::string("a,b")}, Cell{std::int64_t{-1}}, Cell{1.0 / 3.0}});

    const std::string expected =
        "# weakinfo 1.0.0\n"
        "# subcommand: demo\n"
        "# option alpha = 0.5\n"
        "# option mode = fast\n"
        "# file nu.txt | (2,0): 1/2\n"
        "# file nu.txt | (1,1): 1/2\n"
        "name,count,value\n"
        "plain,3,0.5\n"
        "\"a,b\",-1,0.33333333333333331\n";
    CHECK(to_csv(report) == expected);

    // A file without a trailing newline echoes its last line all the same.
    Report tail = report;
    tail.meta.files = {{"nu.txt", "(2,0): 1\n(1,1): 0"}};
    const std::string rendered = to_csv(tail);
    CHECK(rendered.find("# file nu.txt | (1,1): 0\n") != std::string::npos);

    Report ragged = report;
    ragged.rows.push_back({Cell{std::string("short")}});
    CHECK_THROWS_AS(to_csv(ragged), NumericalError);
}

TEST_CASE("json rendering parses back with full structure") {
    Report report;
    report.meta.subcommand = "demo";
    report.meta.options = {{"alpha", "0.5"}};
    report.meta.files = {{"nu.txt", "(2,0): 1\n"}};
    report.columns = {"name", "count", "value"};
    report.rows.push_back({Cell{std::string("plain")}, Cell{std::int64_t{3}}, Cell{0.25}});

    const auto doc = nlohmann::json::parse(to_json(report));
    CHECK(doc["tool"] == "weakinfo");
    CHECK(doc["version"] == version());
    CHECK(doc["subcommand"] == "demo");
    CHECK(doc["options"]["alpha"] == "0.5");
    CHECK(doc["files"]["nu.txt"] == "(2,0): 1\n");
    CHECK(doc["columns"][1] == "count");
    CHECK(doc["rows"][0]["count"] == 3);
    CHECK(doc["rows"][0]["value"] == 0.25);
    CHECK(doc["rows"][0]["name"] == "plain");
}

TEST_CASE("report writing targets stdout or a file, formats are closed") {
    Report report;
    report.meta.subcommand = "demo";
    report.columns = {"x"};
    report.rows.push_back({Cell{std::int64_t{1}}});
    CHECK_THROWS_AS(render_report(report, "yaml"), ConfigError);

    const auto path = std::filesystem::temp_directory_path() / "weakinfo_report_out.csv";
    write_report(report, "csv", path.string());
    CHECK(read_text_file(path.string()) == render_report(report, "csv"));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(write_report(report, "csv", (path / "nodir" / "x.csv").string()),
                    ConfigError);
}
