#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "entroflow/grid.hpp"

namespace entroflow {

/// Decimal with 17 significant digits, enough to round-trip any double.
std::string format_number(double v);

/// Comma separated output with a mandatory header row.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(const char* s) { return cell(std::string(s)); }
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(bool v);
  void end_row();

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t current_ = 0;
};

/// Writes `x,value` (line) or `r,value` (radial), one row per node.
void write_density_csv(std::ostream& out, const GridDensity& mu);

/// Reads a density written by write_density_csv. The ambient dimension is not
/// part of the file and must be supplied for radial data.
GridDensity read_density_csv(std::istream& in, int dim = 1);

}  // namespace entroflow
