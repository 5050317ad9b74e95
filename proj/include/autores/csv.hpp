#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace autores {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double x);
std::string format_number(long long x);
inline std::string format_number(int x) { return format_number(static_cast<long long>(x)); }

/// Comment-prefixed metadata block, header row, then data rows.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;  ///< written as "# key: value"
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string str() const;
  /// Writes atomically (temporary file, then rename).
  void write(const std::filesystem::path& path) const;
};

/// Reads the "# key: value" lines at the top of a CSV file.
std::vector<std::pair<std::string, std::string>> read_metadata(const std::filesystem::path& path);

}  // namespace autores
