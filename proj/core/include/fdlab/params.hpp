#pragma once

#include <string>

namespace fdlab {

enum class Variant { Drift, MeanField };

constexpr const char* variant_name(Variant v) {
  return v == Variant::Drift ? "drift" : "meanfield";
}

// Model parameters for the two equation variants.
//
// Drift:      n_t = div(grad(n^q) + n grad(V)),        V(x) = |x|^lambda / lambda
// MeanField:  rho_t = div(grad(rho^q) + rho grad(V*rho))
//
// Fast-diffusion range q in (0,1); admissibility of q depends on the variant,
// see validate_params.
struct ModelParams {
  int dim = 1;
  double lambda = 2.0;
  double q = 0.5;
  Variant variant = Variant::Drift;
  double mass = 1.0;

  // Derived constants, populated by validate_params.
  double alpha = 0.0;    // reverse-HLS exponent, < 1 iff q > N/(N+lambda)
  double q_star = 0.0;   // mean-field admissibility threshold
  double q_sharp = 0.0;  // (N-2-lambda)/(N-2) for N >= 3, else 0
};

// alpha = (2N - q(2N+lambda)) / (N(1-q)).
double alpha_exponent(int dim, double lambda, double q);

// 2N/(2N+lambda) for lambda != 2; the closed-form case lambda = 2 admits the
// wider range q > N/(N+2).
double q_star_threshold(int dim, double lambda);

double q_sharp_threshold(int dim, double lambda);

// Area of the unit (N-1)-sphere, 2 pi^{N/2} / Gamma(N/2).  S_1 = 2, S_2 = 2 pi.
double sphere_area(int dim);

// Checks admissibility and fills in the derived constants.  MeanField pins
// mass = 1.  Throws QOutOfRange / LambdaOutOfRange / BadParams.
ModelParams validate_params(ModelParams p);

}  // namespace fdlab
