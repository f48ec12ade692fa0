#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hlcp {

/// Input problem with an error code and, when known, the 1-based line number.
class InputError : public std::runtime_error {
public:
    InputError(std::string code, const std::string& message, std::optional<std::size_t> line = {})
        : std::runtime_error(message), code_(std::move(code)), line_(line) {}

    [[nodiscard]] const std::string& code() const noexcept { return code_; }
    [[nodiscard]] std::optional<std::size_t> line() const noexcept { return line_; }

private:
    std::string code_;
    std::optional<std::size_t> line_;
};

/// Comma-separated table. Blank lines are skipped. The first non-blank line
/// is a header iff at least one of its cells is not a number.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // source line of each row
};

[[nodiscard]] CsvTable parse_csv(std::string_view text);
[[nodiscard]] CsvTable read_csv_file(const std::string& path);

/// Locale-independent strict parse of a finite decimal number.
[[nodiscard]] std::optional<double> parse_number(std::string_view cell);

/// Column by header name, or by 0-based index when the selector is an integer.
[[nodiscard]] std::size_t resolve_column(const CsvTable& table, const std::string& selector);

[[nodiscard]] std::vector<double> numeric_column(const CsvTable& table, std::size_t column);
/// Integer month labels 1..12.
[[nodiscard]] std::vector<int> month_column(const CsvTable& table, std::size_t column);

}  // namespace hlcp
