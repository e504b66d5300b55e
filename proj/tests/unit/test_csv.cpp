#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "entroflow/csv.hpp"
#include "entroflow/functionals.hpp"

using namespace entroflow;

TEST_CASE("numbers round-trip with 17 significant digits") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    const auto s = format_number(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_number(0.1).size() >= 15);
}

TEST_CASE("writer enforces the column count") {
  std::ostringstream out;
  CsvWriter csv(out, {"a", "b"});
  csv.cell(1.0);
  CHECK_THROWS_AS(csv.end_row(), std::logic_error);
  std::ostringstream out2;
  CsvWriter csv2(out2, {"a"});
  csv2.cell(1LL);
  CHECK_THROWS_AS(csv2.cell(2LL), std::logic_error);
  csv2.end_row();
  CHECK(out2.str() == "a\n1\n");
  std::ostringstream out3;
  CsvWriter csv3(out3, {"name", "ok"});
  csv3.cell("label").cell(true);
  csv3.end_row();
  CHECK(out3.str() == "name,ok\nlabel,1\n");
}

TEST_CASE("density csv round trip") {
  const Grid g = make_uniform_grid(-8.0, 8.0, 161, 1, Geometry::line);
  const auto mu = gaussian(g, 0.5, 1.3);
  std::stringstream io;
  write_density_csv(io, mu);
  CHECK(io.str().rfind("x,value\n", 0) == 0);
  const auto back = read_density_csv(io);
  REQUIRE(back.size() == mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    CHECK(back[i] == mu[i]);
    CHECK(back.grid()[i] == g[i]);
  }
}

TEST_CASE("radial density csv round trip") {
  const Grid g = make_uniform_grid(0.0, 6.0, 61, 3, Geometry::radial);
  const auto mu = standard_gaussian(g);
  std::stringstream io;
  write_density_csv(io, mu);
  CHECK(io.str().rfind("r,value\n", 0) == 0);
  const auto back = read_density_csv(io, 3);
  CHECK(back.grid().radial());
  CHECK(back.grid().dim() == 3);
  for (std::size_t i = 0; i < mu.size(); ++i) CHECK(back[i] == mu[i]);
}

TEST_CASE("malformed density csv is rejected") {
  std::istringstream bad_header("y,value\n0,1\n");
  CHECK_THROWS_AS(read_density_csv(bad_header), std::invalid_argument);
  std::istringstream bad_number("x,value\n0,1\n0.1,abc\n");
  CHECK_THROWS_AS(read_density_csv(bad_number), std::invalid_argument);
  std::istringstream uneven("x,value\n0,1\n0.1,1\n0.3,1\n0.4,1\n0.5,1\n0.6,1\n0.7,1\n0.8,1\n");
  CHECK_THROWS_AS(read_density_csv(uneven), std::invalid_argument);
}
