#ifndef MISCAL_CSV_HPP
#define MISCAL_CSV_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace miscal {

/// Comma-separated table with a header row. No quoting; '.' decimal point.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws InvalidConfig when absent.
  [[nodiscard]] std::size_t column(std::string_view name) const;
  /// Cell parsed as a double; throws InvalidConfig on malformed numbers.
  [[nodiscard]] double number(std::size_t row, std::size_t col) const;
};

/// Throws IoError when the file cannot be read, InvalidConfig when ragged.
[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal representation, independent of the locale.
[[nodiscard]] std::string format_number(double value);

/// Locale-independent parse of the whole string; throws InvalidConfig.
[[nodiscard]] double parse_number(std::string_view text);

}  // namespace miscal

#endif  // MISCAL_CSV_HPP
