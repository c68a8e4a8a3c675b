#include <doctest.h>

#include <cstring>
#include <sstream>

#include "sbdf/field_io.hpp"
#include "support.hpp"

using namespace sbdf;

TEST_CASE("snapshot round trip") {
  std::mt19937_64 rng(1);
  const Field u = testing::random_field(testing::mixed_grid(7, 0.125), rng);
  std::stringstream ss;
  write_snapshot(ss, u);
  const std::string bytes = ss.str();
  REQUIRE(bytes.size() == kSnapshotHeaderBytes + 8 * 49);
  CHECK(bytes.compare(0, 8, "SBDFGRID") == 0);
  std::uint32_t nx = 0;
  std::memcpy(&nx, bytes.data() + 8, 4);
  CHECK(nx == 7);
  double h = 0;
  std::memcpy(&h, bytes.data() + 16, 8);
  CHECK(h == 0.125);
  const Field back = read_snapshot(ss);
  CHECK(back == u);
}

TEST_CASE("snapshot rejects bad magic and truncation") {
  const Field u(testing::grid(3, 3, 1.0, Boundary::Periodic), 1.0);
  std::stringstream ss;
  write_snapshot(ss, u);
  std::string bytes = ss.str();
  std::string bad = bytes;
  bad[0] = 'X';
  std::istringstream b1(bad);
  CHECK_THROWS_WITH_AS(read_snapshot(b1), doctest::Contains("magic"), std::runtime_error);
  std::istringstream b2(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_snapshot(b2), std::runtime_error);
}

TEST_CASE("csv rows and shortest round-trip doubles") {
  Field u(testing::grid(2, 2, 1.0, Boundary::NeumannZero), {0.1, 2.0, 1.0 / 3.0, -4.5});
  std::ostringstream os;
  write_csv(os, u);
  CHECK(os.str() == "0.1,2\n0.3333333333333333,-4.5\n");
  for (double v : {0.1, 1e-300, 123456.789, -2.5e17, 1.0 / 7.0}) CHECK(std::stod(format_double(v)) == v);
}
