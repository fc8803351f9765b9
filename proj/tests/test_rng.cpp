#include <cmath>
#include <vector>

#include "doctest.h"
#include "slatebandits/rng.hpp"

using namespace slatebandits;

TEST_SUITE_BEGIN("rng");

TEST_CASE("identical seeds produce identical streams") {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) CHECK(a.uniform01() == b.uniform01());
}

TEST_CASE("derived streams differ across indices") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
  CHECK(derive_seed(1, 5, 2) != derive_seed(2, 5, 2));
  CHECK(derive_seed(7, 3, 1) == derive_seed(7, 3, 1));
}

TEST_CASE("uniform stays inside its interval") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.uniform(0.4, 0.5);
    CHECK(v >= 0.4);
    CHECK(v < 0.5);
  }
  CHECK(rng.uniform(0.3, 0.3) == 0.3);  // point mass
}

TEST_CASE("uniform_index covers the full range") {
  Rng rng(11);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) counts[rng.uniform_index(5)]++;
  for (int c : counts) CHECK(c > 8000);  // ~10000 expected each
}

TEST_CASE("beta sampler matches its moments") {
  Rng rng(42);
  const double a = 3.0, b = 7.0;
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.beta(a, b);
    CHECK(x > 0.0);
    CHECK(x < 1.0);
    sum += x;
  }
  CHECK(std::abs(sum / n - a / (a + b)) < 0.005);
}

TEST_CASE("normal sampler is roughly standard") {
  Rng rng(5);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_SUITE_END();
