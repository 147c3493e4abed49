#ifndef WEAKINFO_REPORT_HPP
#define WEAKINFO_REPORT_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "weakinfo/errors.hpp"
#include "weakinfo/version.hpp"

namespace weakinfo {

/// One table cell; doubles are rendered with 17 significant digits so that
/// equal results produce byte-identical reports.
using Cell = std::variant<std::int64_t, double, std::string>;

struct ReportMeta {
    std::string subcommand;
    // Resolved options in a fixed order, already rendered as strings.
    std::vector<std::pair<std::string, std::string>> options;
    // Raw bytes of every input file, keyed by the path the user supplied.
    std::vector<std::pair<std::string, std::string>> files;
};

struct Report {
    ReportMeta meta;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

inline std::string format_float(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

namespace detail {

inline std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string quoted = "\"";
    for (char c : cell) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

inline std::string render_cell(const Cell& cell) {
    if (std::holds_alternative<std::int64_t>(cell))
        return std::to_string(std::get<std::int64_t>(cell));
    if (std::holds_alternative<double>(cell)) return format_float(std::get<double>(cell));
    return csv_escape(std::get<std::string>(cell));
}

} // namespace detail

inline std::string to_csv(const Report& report) {
    std::string out;
    out += "# weakinfo ";
    out += version();
    out += '\n';
    out += "# subcommand: " + report.meta.subcommand + '\n';
    for (const auto& [key, value] : report.meta.options)
        out += "# option " + key + " = " + value + '\n';
    for (const auto& [name, raw] : report.meta.files) {
        // Echo the file verbatim, one comment line per input line; the bytes
        // between prefix and newline are untouched.
        std::size_t begin = 0;
        while (begin <= raw.size()) {
            const std::size_t end = raw.find('\n', begin);
            const std::string line =
                end == std::string::npos ? raw.substr(begin) : raw.substr(begin, end - begin);
            if (end == std::string::npos && line.empty() && begin > 0) break;
            out += "# file " + name + " | " + line + '\n';
            if (end == std::string::npos) break;
            begin = end + 1;
        }
    }
    for (std::size_t i = 0; i < report.columns.size(); ++i) {
        if (i) out += ',';
        out += detail::csv_escape(report.columns[i]);
    }
    out += '\n';
    for (const auto& row : report.rows) {
        if (row.size() != report.columns.size())
            throw NumericalError("report row width does not match the column count");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += detail::render_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

inline std::string to_json(const Report& report) {
    nlohmann::ordered_json doc;
    doc["tool"] = "weakinfo";
    doc["version"] = version();
    doc["subcommand"] = report.meta.subcommand;
    nlohmann::ordered_json options = nlohmann::ordered_json::object();
    for (const auto& [key, value] : report.meta.options) options[key] = value;
    doc["options"] = std::move(options);
    nlohmann::ordered_json files = nlohmann::ordered_json::object();
    for (const auto& [name, raw] : report.meta.files) files[name] = raw;
    doc["files"] = std::move(files);
    doc["columns"] = report.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
        if (row.size() != report.columns.size())
            throw NumericalError("report row width does not match the column count");
        nlohmann::ordered_json entry = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            const Cell& cell = row[i];
            if (std::holds_alternative<std::int64_t>(cell))
                entry[report.columns[i]] = std::get<std::int64_t>(cell);
            else if (std::holds_alternative<double>(cell))
                entry[report.columns[i]] = std::get<double>(cell);
            else
                entry[report.columns[i]] = std::get<std::string>(cell);
        }
        rows.push_back(std::move(entry));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

inline std::string render_report(const Report& report, const std::string& format) {
    if (format == "csv") return to_csv(report);
    if (format == "json") return to_json(report);
    throw ConfigError("unknown report format '" + format + "' (expected csv or json)");
}

/// Writes to the given path, or to stdout when the path is empty.
inline void write_report(const Report& report, const std::string& format,
                         const std::string& out_path) {
    const std::string body = render_report(report, format);
    if (out_path.empty()) {
        std::cout << body;
        std::cout.flush();
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + out_path);
    out << body;
    if (!out) throw ConfigError("failed writing output file: " + out_path);
}

} // namespace weakinfo

#endif
