#include "hlcp/csv_input.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hlcp {

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && ws(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_cells(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        const auto cell = trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
        std::string c(cell);
        if (c.size() >= 2 && c.front() == '"' && c.back() == '"') c = c.substr(1, c.size() - 2);
        cells.push_back(std::move(c));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

}  // namespace

std::optional<double> parse_number(std::string_view cell) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    if (cell.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

CsvTable parse_csv(std::string_view text) {
    CsvTable table;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool first = true;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const auto line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        ++line_no;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (trim(line).empty()) continue;
        auto cells = split_cells(line);
        if (first) {
            first = false;
            const bool is_header = std::any_of(cells.begin(), cells.end(),
                                               [](const std::string& c) { return !parse_number(c); });
            if (is_header) {
                table.header = std::move(cells);
                continue;
            }
        }
        table.rows.push_back(std::move(cells));
        table.line_numbers.push_back(line_no);
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("unreadable_file", "cannot open input file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

std::size_t resolve_column(const CsvTable& table, const std::string& selector) {
    const auto it = std::find(table.header.begin(), table.header.end(), selector);
    if (it != table.header.end()) {
        return static_cast<std::size_t>(it - table.header.begin());
    }
    std::size_t idx = 0;
    const auto [ptr, ec] = std::from_chars(selector.data(), selector.data() + selector.size(), idx);
    if (ec == std::errc() && ptr == selector.data() + selector.size()) {
        return idx;
    }
    throw InputError("unknown_column", "no column named '" + selector + "'");
}

std::vector<double> numeric_column(const CsvTable& table, std::size_t column) {
    std::vector<double> out;
    out.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = table.line_numbers[r];
        if (column >= row.size()) {
            throw InputError("missing_cell", "row has no column " + std::to_string(column), line);
        }
        const auto v = parse_number(row[column]);
        if (!v) {
            throw InputError("non_numeric", "non-numeric cell '" + row[column] + "'", line);
        }
        out.push_back(*v);
    }
    return out;
}

std::vector<int> month_column(const CsvTable& table, std::size_t column) {
    std::vector<int> out;
    out.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = table.line_numbers[r];
        if (column >= row.size()) {
            throw InputError("missing_month", "row has no month column", line);
        }
        const auto v = parse_number(row[column]);
        if (!v || *v != std::floor(*v) || *v < 1.0 || *v > 12.0) {
            throw InputError("invalid_month", "month label '" + row[column] + "' is not an integer in 1..12",
                             line);
        }
        out.push_back(static_cast<int>(*v));
    }
    return out;
}

}  // namespace hlcp
