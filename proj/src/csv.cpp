#include "autores/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "autores/error.hpp"

namespace autores {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0) return "0";  // no "-0"
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw NumericalError("number formatting failed");
  return {buf, end};
}

std::string format_number(long long x) { return std::to_string(x); }

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw NumericalError("CSV row width does not match the header");
  rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::ostringstream os;
  for (const auto& [k, v] : meta) os << "# " << k << ": " << v << '\n';
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
    os << '\n';
  }
  return os.str();
}

void CsvTable::write(const std::filesystem::path& path) const {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << str();
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::pair<std::string, std::string>> read_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::vector<std::pair<std::string, std::string>> meta;
  std::string line;
  while (std::getline(in, line) && line.rfind("# ", 0) == 0) {
    const auto colon = line.find(": ", 2);
    if (colon == std::string::npos) continue;
    meta.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
  }
  return meta;
}

}  // namespace autores
