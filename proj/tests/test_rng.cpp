#include <cmath>

#include "doctest.h"
#include "fdlab/rng.hpp"

using namespace fdlab;

TEST_CASE("the stream is a pure function of the seed") {
  Rng a(123456789), b(123456789), c(987654321);
  bool all_equal = true;
  bool any_differ = false;
  for (int i = 0; i < 64; ++i) {
    const double va = a.uniform();
    all_equal = all_equal && va == b.uniform();
    any_differ = any_differ || va != c.uniform();
  }
  CHECK(all_equal);
  CHECK(any_differ);
}

TEST_CASE("seed 42 regression values") {
  // Raw mt19937_64 words mapped as (word >> 11) * 2^-53; pinned so a change
  // in the variate derivation cannot slip through unnoticed.
  Rng u(42);
  CHECK(u.uniform() == 0.75515553295453897);
  CHECK(u.uniform() == 0.63903139385469743);
  CHECK(u.uniform() == 0.7521452007480266);

  Rng n(42);
  CHECK(n.normal() == -1.0771745442782885);
  CHECK(n.normal() == -1.2860634502166481);
}

TEST_CASE("uniform variates stay in [0,1) with the right moments") {
  Rng rng(7);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean - 0.5) < 5e-3);
  CHECK(std::abs(var - 1.0 / 12.0) < 5e-3);
}

TEST_CASE("normal variates have standard moments") {
  Rng rng(11);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 2e-2);
  CHECK(std::abs(sumsq / n - mean * mean - 1.0) < 5e-2);
}
