#pragma once

// Small deterministic CSV writer: one provenance comment line, a header
// row, then data rows. Doubles are printed with %.17g so files are
// bit-identical across runs with the same configuration.

#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace stripheat::csv {

std::string fnv1a_hex(const std::string& data);
std::string fmt_double(double x);
std::string fmt_int(long long x);

class Writer {
 public:
  // Writes "# stripheat <version> <provenance>" followed by the header.
  Writer(const std::string& path, std::span<const std::string> columns,
         const std::string& provenance);

  void row(std::span<const std::string> cells);
  void row_values(std::span<const double> values);

 private:
  std::ofstream out_;
  std::size_t ncols_;
};

}  // namespace stripheat::csv
