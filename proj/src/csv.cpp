#include "stripheat/csv.hpp"

#include <cstdint>
#include <cstdio>
#include <stdexcept>

#include "stripheat/core.hpp"

namespace stripheat::csv {

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_int(long long x) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%lld", x);
  return buf;
}

Writer::Writer(const std::string& path, std::span<const std::string> columns,
               const std::string& provenance)
    : out_(path), ncols_(columns.size()) {
  if (!out_) throw std::runtime_error("csv: cannot open " + path);
  if (columns.empty()) throw std::invalid_argument("csv: no columns");
  out_ << "# stripheat " << kVersion;
  if (!provenance.empty()) out_ << " " << provenance;
  out_ << "\n";
  for (std::size_t k = 0; k < columns.size(); ++k)
    out_ << (k ? "," : "") << columns[k];
  out_ << "\n";
}

void Writer::row(std::span<const std::string> cells) {
  if (cells.size() != ncols_)
    throw std::invalid_argument("csv: row width does not match header");
  for (std::size_t k = 0; k < cells.size(); ++k)
    out_ << (k ? "," : "") << cells[k];
  out_ << "\n";
  if (!out_) throw std::runtime_error("csv: write failed");
}

void Writer::row_values(std::span<const double> values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(fmt_double(v));
  row(cells);
}

}  // namespace stripheat::csv
