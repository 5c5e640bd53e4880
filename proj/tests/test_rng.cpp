#include "emlsr/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace emlsr;

TEST_CASE("streams replay exactly for a fixed seed") {
  RngStream a(42, StreamId::Motion);
  RngStream b(42, StreamId::Motion);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform01() == b.uniform01());
}

TEST_CASE("subsystem streams are distinct") {
  RngStream a(42, StreamId::Motion);
  RngStream b(42, StreamId::Measurement);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += a.uniform01() == b.uniform01() ? 1 : 0;
  CHECK(same < 4);
}

TEST_CASE("uniform01 stays in range") {
  RngStream r(7, StreamId::Contention);
  for (int i = 0; i < 10'000; ++i) {
    const double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal draws have unit scale") {
  RngStream r(1, StreamId::Measurement);
  const int n = 100'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}
