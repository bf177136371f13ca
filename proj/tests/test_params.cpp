#include <cmath>

#include "doctest.h"
#include "fdlab/params.hpp"
#include "support.hpp"

using namespace fdlab;

TEST_CASE("alpha exponent hits its landmarks") {
  // alpha = 1 at q = N/(N+lambda) up to one rounding of q, alpha = 0 at
  // q = 2N/(2N+lambda) exactly in double arithmetic for this evaluation order.
  for (int dim : {1, 2, 3, 5}) {
    const double n = dim;
    for (double lambda : {0.5, 1.0, 2.0, 3.0, 4.0, 6.0}) {
      CAPTURE(dim);
      CAPTURE(lambda);
      CHECK(alpha_exponent(dim, lambda, 2.0 * n / (2.0 * n + lambda)) == 0.0);
      CHECK(std::abs(alpha_exponent(dim, lambda, n / (n + lambda)) - 1.0) <= 2e-15);
    }
  }
}

TEST_CASE("alpha decreases in q and crosses 1 at the potential threshold") {
  const int dim = 2;
  const double lambda = 3.0;
  const double q_pot = 2.0 / (2.0 + lambda);
  double prev = alpha_exponent(dim, lambda, 0.05);
  for (double q = 0.10; q < 1.0; q += 0.05) {
    const double a = alpha_exponent(dim, lambda, q);
    CHECK(a < prev);
    CHECK((a < 1.0) == (q > q_pot));
    prev = a;
  }
}

TEST_CASE("thresholds") {
  CHECK(q_star_threshold(1, 2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(q_star_threshold(3, 2.0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(q_star_threshold(1, 4.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(q_star_threshold(2, 3.0) == doctest::Approx(4.0 / 7.0).epsilon(1e-15));

  CHECK(q_sharp_threshold(1, 2.0) == 0.0);
  CHECK(q_sharp_threshold(2, 5.0) == 0.0);
  CHECK(q_sharp_threshold(3, 2.0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(q_sharp_threshold(5, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("sphere areas") {
  const double pi = 3.14159265358979323846;
  CHECK(sphere_area(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sphere_area(2) == doctest::Approx(2.0 * pi).epsilon(1e-14));
  CHECK(sphere_area(3) == doctest::Approx(4.0 * pi).epsilon(1e-14));
  CHECK(sphere_area(4) == doctest::Approx(2.0 * pi * pi).epsilon(1e-14));
}

TEST_CASE("validate_params accepts the interior and fills derived constants") {
  ModelParams p;
  p.dim = 1;
  p.lambda = 2.0;
  p.q = 0.5;
  p.variant = Variant::Drift;
  p.mass = 2.5;
  const ModelParams v = validate_params(p);
  CHECK(v.alpha == alpha_exponent(1, 2.0, 0.5));
  CHECK(v.q_star == q_star_threshold(1, 2.0));
  CHECK(v.q_sharp == 0.0);
  CHECK(v.mass == 2.5);

  ModelParams m;
  m.dim = 2;
  m.lambda = 4.0;
  m.q = 0.9;
  m.variant = Variant::MeanField;
  m.mass = 7.0;
  CHECK(validate_params(m).mass == 1.0);
}

TEST_CASE("validate_params rejects boundaries and bad inputs") {
  ModelParams p;
  p.variant = Variant::Drift;
  p.dim = 1;
  p.lambda = 2.0;

  p.q = 1.0 / 3.0;  // exactly the drift threshold N/(N+lambda)
  CHECK_ERROR_CODE(validate_params(p), QOutOfRange);
  p.q = 1.0;
  CHECK_ERROR_CODE(validate_params(p), QOutOfRange);
  p.q = 0.2;
  CHECK_ERROR_CODE(validate_params(p), QOutOfRange);

  p.q = 0.5;
  p.lambda = 0.0;
  CHECK_ERROR_CODE(validate_params(p), LambdaOutOfRange);
  p.lambda = -1.0;
  CHECK_ERROR_CODE(validate_params(p), LambdaOutOfRange);

  p.lambda = 2.0;
  p.dim = 0;
  CHECK_ERROR_CODE(validate_params(p), BadParams);
  p.dim = 1;
  p.mass = 0.0;
  CHECK_ERROR_CODE(validate_params(p), BadParams);

  ModelParams m;
  m.variant = Variant::MeanField;
  m.dim = 2;
  m.lambda = 1.5;  // mean-field interaction needs lambda >= 2
  m.q = 0.8;
  CHECK_ERROR_CODE(validate_params(m), LambdaOutOfRange);

  m.lambda = 2.0;
  m.q = 0.5;  // exactly N/(N+2)
  CHECK_ERROR_CODE(validate_params(m), QOutOfRange);

  m.lambda = 3.0;
  m.q = 4.0 / 7.0;  // exactly 2N/(2N+lambda)
  CHECK_ERROR_CODE(validate_params(m), QOutOfRange);
}
