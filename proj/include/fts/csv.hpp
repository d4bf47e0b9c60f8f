#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fts/core.hpp"
#include "fts/errors.hpp"

namespace fts::csv {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                 : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

inline bool parse_double(std::string_view field, double& out) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && !field.empty();
}

}  // namespace detail

/// Shortest round-trip decimal form; independent of the global locale.
inline std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

inline std::string format_fixed(double value, int precision) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, precision);
    return std::string(buf, ptr);
}

/**
 * Reads one curve per row, G comma-separated reals per row. A first row with
 * any non-numeric field is treated as a header naming the grid points. Blank
 * lines are skipped; rows of differing width are rejected.
 */
inline FunctionalTimeSeries read_series(std::istream& in) {
    std::string line;
    std::vector<double> values;
    std::size_t width = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = detail::trim(line);
        if (view.empty()) continue;
        const auto fields = detail::split(view);
        std::vector<double> parsed(fields.size());
        bool numeric = true;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!detail::parse_double(fields[i], parsed[i])) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first_content) {
                first_content = false;
                width = fields.size();
                continue;
            }
            throw ParseError("line " + std::to_string(line_no) + ": non-numeric field");
        }
        if (width == 0) width = fields.size();
        if (fields.size() != width) {
            throw ParseError("line " + std::to_string(line_no) + ": ragged row (" + std::to_string(fields.size()) +
                             " fields, expected " + std::to_string(width) + ")");
        }
        first_content = false;
        values.insert(values.end(), parsed.begin(), parsed.end());
        ++rows;
    }
    if (rows == 0) throw ParseError("no data rows");
    return {rows, width, std::move(values)};
}

inline FunctionalTimeSeries read_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return read_series(in);
}

inline void write_series(std::ostream& out, const FunctionalTimeSeries& series) {
    for (std::size_t t = 1; t <= series.length(); ++t) {
        const auto row = series.curve(t);
        for (std::size_t g = 0; g < row.size(); ++g) {
            if (g) out << ',';
            out << format_double(row[g]);
        }
        out << '\n';
    }
}

}  // namespace fts::csv
