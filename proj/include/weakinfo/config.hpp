#ifndef WEAKINFO_CONFIG_HPP
#define WEAKINFO_CONFIG_HPP

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "weakinfo/errors.hpp"
#include "weakinfo/lattice.hpp"
#include "weakinfo/rational.hpp"
#include "weakinfo/utility.hpp"

namespace weakinfo {

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

inline std::string strip_comment(const std::string& line) {
    const std::size_t pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

/// Parses a scalar that may be written as a plain number or a fraction "p/q".
inline double parse_double_value(const std::string& text, const std::string& context) {
    const std::string value = trim(text);
    if (value.empty()) throw ConfigError(context + ": empty number");
    const auto parse_plain = [&](const std::string& piece) {
        const std::string body = trim(piece);
        std::size_t used = 0;
        const double parsed = std::stod(body, &used);
        if (used != body.size() || body.empty()) throw std::invalid_argument(body);
        return parsed;
    };
    try {
        const std::size_t slash = value.find('/');
        if (slash != std::string::npos) {
            const double num = parse_plain(value.substr(0, slash));
            const double den = parse_plain(value.substr(slash + 1));
            if (den == 0) throw ConfigError(context + ": zero denominator in '" + value + "'");
            return num / den;
        }
        return parse_plain(value);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError(context + ": cannot parse number '" + value + "'");
    }
}

template <typename S>
S parse_scalar_value(const std::string& text, const std::string& context) {
    if constexpr (is_rational_v<S>) {
        return rational_from_string(trim(text), context);
    } else {
        return parse_double_value(text, context);
    }
}

} // namespace detail

/**
 * Line-oriented `key = value` configuration. `#` starts a comment, blank
 * lines are skipped, list values are bracketed `[a, b, c]`, and numeric
 * values accept fractions like `3/2`. The raw file bytes are retained so
 * reports can echo their exact inputs.
 */
class ConfigFile {
public:
    static ConfigFile parse(const std::string& text, std::string origin) {
        ConfigFile config;
        config.raw_ = text;
        config.origin_ = std::move(origin);
        std::istringstream stream(text);
        std::string line;
        int line_number = 0;
        while (std::getline(stream, line)) {
            ++line_number;
            const std::string body = detail::trim(detail::strip_comment(line));
            if (body.empty()) continue;
            const std::size_t eq = body.find('=');
            if (eq == std::string::npos)
                throw ConfigError(config.origin_ + ":" + std::to_string(line_number) +
                                  ": expected 'key = value', got '" + body + "'");
            const std::string key = detail::trim(body.substr(0, eq));
            const std::string value = detail::trim(body.substr(eq + 1));
            if (key.empty())
                throw ConfigError(config.origin_ + ":" + std::to_string(line_number) +
                                  ": empty key");
            if (config.values_.count(key))
                throw ConfigError(config.origin_ + ":" + std::to_string(line_number) +
                                  ": duplicate key '" + key + "'");
            config.values_[key] = value;
            config.order_.emplace_back(key, value);
        }
        return config;
    }

    static ConfigFile parse_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot read config file: " + path);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return parse(buffer.str(), path);
    }

    const std::string& raw() const { return raw_; }
    const std::string& origin() const { return origin_; }
    const std::vector<std::pair<std::string, std::string>>& entries() const { return order_; }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    const std::string& get(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end())
            throw ConfigError(origin_ + ": missing required key '" + key + "'");
        return it->second;
    }

    int get_int(const std::string& key) const {
        const std::string& value = get(key);
        try {
            std::size_t used = 0;
            const int parsed = std::stoi(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
            return parsed;
        } catch (const std::exception&) {
            throw ConfigError(origin_ + ": key '" + key + "': cannot parse integer '" + value +
                              "'");
        }
    }

    double get_double(const std::string& key) const {
        return detail::parse_double_value(get(key), origin_ + ": key '" + key + "'");
    }

    template <typename S>
    S get_scalar(const std::string& key) const {
        return detail::parse_scalar_value<S>(get(key), origin_ + ": key '" + key + "'");
    }

    std::vector<std::string> get_list(const std::string& key) const {
        const std::string value = get(key);
        if (value.size() < 2 || value.front() != '[' || value.back() != ']')
            throw ConfigError(origin_ + ": key '" + key + "': expected a list like [a, b, c]");
        std::vector<std::string> items;
        std::string body = value.substr(1, value.size() - 2);
        std::istringstream stream(body);
        std::string item;
        while (std::getline(stream, item, ',')) {
            const std::string trimmed = detail::trim(item);
            if (trimmed.empty())
                throw ConfigError(origin_ + ": key '" + key + "': empty list element");
            items.push_back(trimmed);
        }
        return items;
    }

    template <typename S>
    std::vector<S> get_scalar_list(const std::string& key) const {
        std::vector<S> out;
        for (const std::string& item : get_list(key))
            out.push_back(detail::parse_scalar_value<S>(item, origin_ + ": key '" + key + "'"));
        return out;
    }

private:
    std::string raw_;
    std::string origin_;
    std::map<std::string, std::string> values_;
    std::vector<std::pair<std::string, std::string>> order_;
};

/**
 * Builds the market from a config file with keys:
 *   n             number of periods
 *   factors       list of distinct positive growth factors, e.g. [3/2, 1/2]
 *   rate          one-period interest rate
 *   initial_price optional, defaults to 1
 *   risk_neutral  optional list of one-period martingale weights (required
 *                 when there are more than two factors)
 */
template <typename S>
MultinomialEconomy<S> economy_from_config(const ConfigFile& config) {
    const int n = config.get_int("n");
    const std::vector<S> factors = config.get_scalar_list<S>("factors");
    const S rate = config.get_scalar<S>("rate");
    const S initial_price = config.has("initial_price")
                                ? config.get_scalar<S>("initial_price")
                                : S(1);
    std::optional<std::vector<S>> risk_neutral;
    if (config.has("risk_neutral")) risk_neutral = config.get_scalar_list<S>("risk_neutral");
    return build_economy<S>(n, factors, rate, initial_price, risk_neutral);
}

/**
 * Parses a terminal law given one class per line as `(j1, j2, ...): mass`
 * (separators inside the parentheses may be commas or spaces). Classes not
 * listed carry zero mass; the masses must form a probability vector over the
 * terminal classes of an n-period walk with k factors.
 */
template <typename S>
TerminalLaw<S> parse_terminal_law(const std::string& text, const std::string& origin, int n,
                                  int k) {
    const ClassIndex index(n, k);
    std::vector<S> mass(index.size(), S(0));
    std::vector<bool> seen(index.size(), false);

    std::istringstream stream(text);
    std::string line;
    int line_number = 0;
    bool any = false;
    while (std::getline(stream, line)) {
        ++line_number;
        const std::string body = detail::trim(detail::strip_comment(line));
        if (body.empty()) continue;
        const std::string context = origin + ":" + std::to_string(line_number);

        if (body.front() != '(')
            throw ConfigError(context + ": expected '(j1, j2, ...): mass', got '" + body + "'");
        const std::size_t close = body.find(')');
        if (close == std::string::npos) throw ConfigError(context + ": missing ')'");
        std::string tuple_text = body.substr(1, close - 1);
        for (char& c : tuple_text)
            if (c == ',') c = ' ';
        std::istringstream tuple_stream(tuple_text);
        CountClass counts;
        int value = 0;
        while (tuple_stream >> value) counts.push_back(value);
        if (!tuple_stream.eof())
            throw ConfigError(context + ": cannot parse class tuple '(" + tuple_text + ")'");

        std::size_t after = close + 1;
        while (after < body.size() && std::isspace(static_cast<unsigned char>(body[after])))
            ++after;
        if (after >= body.size() || body[after] != ':')
            throw ConfigError(context + ": expected ':' after the class tuple");
        const std::string mass_text = detail::trim(body.substr(after + 1));

        const std::size_t slot = index.at(counts); // throws ClassMismatch on a bad tuple
        if (seen[slot]) throw ConfigError(context + ": duplicate class " +
                                          ClassIndex::format_class(counts));
        seen[slot] = true;
        mass[slot] = detail::parse_scalar_value<S>(mass_text, context);
        any = true;
    }
    if (!any) throw ConfigError(origin + ": no terminal masses found");
    return make_terminal_law<S>(n, k, mass);
}

/**
 * Parses a tabulated utility given one grid row per line as
 * `x U(x) U'(x)` (whitespace separated), building the interpolated utility.
 */
inline Utility parse_tabulated_utility(const std::string& text, const std::string& origin) {
    std::vector<double> xs, us, uprimes;
    std::istringstream stream(text);
    std::string line;
    int line_number = 0;
    while (std::getline(stream, line)) {
        ++line_number;
        const std::string body = detail::trim(detail::strip_comment(line));
        if (body.empty()) continue;
        const std::string context = origin + ":" + std::to_string(line_number);
        std::istringstream row(body);
        double x = 0, u = 0, uprime = 0;
        if (!(row >> x >> u >> uprime))
            throw ConfigError(context + ": expected 'x U(x) U'(x)', got '" + body + "'");
        std::string extra;
        if (row >> extra) throw ConfigError(context + ": trailing content '" + extra + "'");
        xs.push_back(x);
        us.push_back(u);
        uprimes.push_back(uprime);
    }
    if (xs.empty()) throw ConfigError(origin + ": no utility rows found");
    return tabulated_utility(xs, us, uprimes);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace weakinfo

#endif
