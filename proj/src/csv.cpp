#include "entroflow/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace entroflow {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (current_ >= columns_) throw std::logic_error("csv: too many cells in row");
  if (current_) out_ << ',';
  out_ << s;
  ++current_;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_number(v)); }
CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }
CsvWriter& CsvWriter::cell(bool v) { return cell(std::string(v ? "1" : "0")); }

void CsvWriter::end_row() {
  if (current_ != columns_) throw std::logic_error("csv: incomplete row");
  out_ << '\n';
  current_ = 0;
}

void write_density_csv(std::ostream& out, const GridDensity& mu) {
  CsvWriter csv(out, {mu.grid().radial() ? "r" : "x", "value"});
  const auto x = mu.grid().nodes();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    csv.cell(x[i]).cell(mu[i]);
    csv.end_row();
  }
}

GridDensity read_density_csv(std::istream& in, int dim) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("density csv: empty input");
  Geometry geometry;
  if (line == "x,value") {
    geometry = Geometry::line;
  } else if (line == "r,value") {
    geometry = Geometry::radial;
  } else {
    throw std::invalid_argument("density csv: unexpected header '" + line + "'");
  }
  std::vector<double> xs;
  std::vector<double> vs;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("density csv: missing comma on row " + std::to_string(row));
    double x = 0.0;
    double v = 0.0;
    const char* b = line.data();
    const auto r1 = std::from_chars(b, b + comma, x);
    const auto r2 = std::from_chars(b + comma + 1, b + line.size(), v);
    if (r1.ec != std::errc() || r2.ec != std::errc())
      throw std::invalid_argument("density csv: malformed number on row " + std::to_string(row));
    xs.push_back(x);
    vs.push_back(v);
  }
  if (xs.size() < 8) throw std::invalid_argument("density csv: too few rows");
  Grid grid(xs.front(), xs.back(), xs.size(), geometry == Geometry::line ? 1 : dim, geometry);
  const double tol = 1e-9 * std::max(1.0, std::abs(xs.back()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(grid[i] - xs[i]) > tol)
      throw std::invalid_argument("density csv: nodes are not uniformly spaced");
  }
  return GridDensity(grid, std::move(vs));
}

}  // namespace entroflow
