#ifndef QSR_CSV_HPP
#define QSR_CSV_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qsr::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and
/// doubled quotes. Returns nullopt for an unterminated quote.
std::optional<std::vector<std::string>> split_line(std::string_view line);

/// Shortest decimal text that parses back to exactly `x`.
std::string format_number(double x);

std::optional<double> parse_double(std::string_view text) noexcept;
std::optional<long long> parse_int(std::string_view text) noexcept;

/// Parses a comma-separated list of reals ("0.25,0.5"). Empty items fail.
std::optional<std::vector<double>> parse_real_list(std::string_view text);

std::string join(std::span<const std::string> fields);

}  // namespace qsr::csv

#endif  // QSR_CSV_HPP
