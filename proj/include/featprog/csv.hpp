#pragma once

// Wide CSV dialect: comma separator, '.' decimal, LF line endings, header row
// required, optional leading `time` column, missing cells empty or NaN.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "featprog/errors.hpp"
#include "featprog/series.hpp"

namespace featprog::csv {

namespace detail {

inline std::vector<std::string> split_record(std::string_view line, std::size_t line_no) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (quoted) throw data_error("unterminated quote on line " + std::to_string(line_no));
    cells.push_back(std::move(cur));
    return cells;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline Sample parse_cell(std::string_view cell, std::size_t line_no, std::size_t col) {
    cell = trim(cell);
    if (cell.empty() || cell == "NaN" || cell == "nan" || cell == "NAN") return std::nullopt;
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw data_error("cannot parse '" + std::string(cell) + "' on line " + std::to_string(line_no) +
                         ", column " + std::to_string(col + 1));
    }
    return std::isfinite(v) ? Sample{v} : std::nullopt;
}

inline std::string quote(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

}  // namespace detail

/// Shortest decimal text that round-trips to the same double.
[[nodiscard]] inline std::string format_number(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

[[nodiscard]] inline Panel read_panel(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) {
            header = detail::split_record(line, line_no);
            break;
        }
    }
    if (header.empty()) throw data_error("CSV has no header row");
    for (auto& h : header) h = std::string(detail::trim(h));

    const bool has_time = header.front() == "time";
    const std::size_t first = has_time ? 1 : 0;
    if (header.size() <= first) throw data_error("CSV has no variate columns");

    std::vector<Series> cols(header.size() - first);
    std::vector<std::int64_t> time;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_record(line, line_no);
        if (cells.size() != header.size()) {
            throw data_error("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                             " cells, header has " + std::to_string(header.size()));
        }
        if (has_time) {
            const auto cell = detail::trim(cells.front());
            std::int64_t stamp = 0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), stamp);
            if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
                throw data_error("bad time label on line " + std::to_string(line_no));
            }
            time.push_back(stamp);
        }
        for (std::size_t c = first; c < cells.size(); ++c) {
            cols[c - first].push_back(detail::parse_cell(cells[c], line_no, c));
        }
    }
    if (cols.front().empty()) throw data_error("CSV has no data rows");
    return Panel(std::move(cols), std::move(time),
                 std::vector<std::string>(header.begin() + static_cast<std::ptrdiff_t>(first), header.end()));
}

inline void write_panel(std::ostream& out, const Panel& p) {
    out << "time";
    for (const auto& n : p.names()) out << ',' << detail::quote(n);
    out << '\n';
    for (std::size_t t = 0; t < p.length(); ++t) {
        out << p.time()[t];
        for (std::size_t i = 0; i < p.n_variates(); ++i) {
            out << ',';
            if (const auto& v = p.variate(i)[t]) out << format_number(*v);
        }
        out << '\n';
    }
}

/// Columns: `time`, then `<variate>::<feature>` variate-major in program order.
inline void write_features(std::ostream& out, const FeatureMatrix& m) {
    const auto& names = m.panel().names();
    out << "time";
    for (std::size_t i = 0; i < m.n_variates(); ++i)
        for (const auto& f : m.variate(i)) out << ',' << detail::quote(names[i] + "::" + f.name);
    out << '\n';
    for (std::size_t t = 0; t < m.length(); ++t) {
        out << m.panel().time()[t];
        for (std::size_t i = 0; i < m.n_variates(); ++i) {
            for (const auto& f : m.variate(i)) {
                out << ',';
                if (const auto& v = f.values[t]) out << format_number(*v);
            }
        }
        out << '\n';
    }
}

}  // namespace featprog::csv
