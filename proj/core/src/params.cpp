#include "fdlab/params.hpp"

#include <cmath>
#include <sstream>

#include "fdlab/errors.hpp"

namespace fdlab {

double alpha_exponent(int dim, double lambda, double q) {
  const double n = static_cast<double>(dim);
  return (2.0 * n - q * (2.0 * n + lambda)) / (n * (1.0 - q));
}

double q_star_threshold(int dim, double lambda) {
  const double n = static_cast<double>(dim);
  if (lambda == 2.0) return n / (n + 2.0);
  return 2.0 * n / (2.0 * n + lambda);
}

double q_sharp_threshold(int dim, double lambda) {
  if (dim < 3) return 0.0;
  const double n = static_cast<double>(dim);
  return (n - 2.0 - lambda) / (n - 2.0);
}

double sphere_area(int dim) {
  const double half_n = 0.5 * static_cast<double>(dim);
  return 2.0 * std::pow(M_PI, half_n) / std::tgamma(half_n);
}

ModelParams validate_params(ModelParams p) {
  if (p.dim < 1) fail(ErrorCode::BadParams, "dimension must be a positive integer");
  if (!(p.lambda > 0.0)) fail(ErrorCode::LambdaOutOfRange, "lambda must be positive");
  if (p.variant == Variant::MeanField && p.lambda < 2.0)
    fail(ErrorCode::LambdaOutOfRange, "mean-field variant needs lambda >= 2");

  if (p.variant == Variant::MeanField) {
    p.mass = 1.0;
  } else if (!(p.mass > 0.0)) {
    fail(ErrorCode::BadParams, "mass must be positive");
  }

  const double n = static_cast<double>(p.dim);
  const double q_lo =
      p.variant == Variant::Drift ? n / (n + p.lambda) : q_star_threshold(p.dim, p.lambda);
  if (!(p.q > q_lo) || !(p.q < 1.0)) {
    std::ostringstream os;
    os << "q = " << p.q << " outside admissible range (" << q_lo << ", 1) for "
       << variant_name(p.variant);
    fail(ErrorCode::QOutOfRange, os.str());
  }

  p.alpha = alpha_exponent(p.dim, p.lambda, p.q);
  p.q_star = q_star_threshold(p.dim, p.lambda);
  p.q_sharp = q_sharp_threshold(p.dim, p.lambda);
  return p;
}

}  // namespace fdlab
