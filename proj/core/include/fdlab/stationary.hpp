#pragma once

#include <memory>

#include "fdlab/kernels.hpp"
#include "fdlab/params.hpp"
#include "fdlab/profile.hpp"

namespace fdlab {

// A constructed stationary state together with the multiplier of its defining
// relation q/(1-q) rho^{q-1} = potential + constant.
//
// h_or_c is the constant the construction hands back: h for Drift, the
// closed-form C for MeanField lambda = 2, the bisected C for the fixed point.
// c_equation is the multiplier in the defining relation written against the
// convolution V_lambda * rho.  The two differ only for the lambda = 2 closed
// form, where V_2 * rho = |x|^2/2 + M2/2 for a centered unit mass, so
// c_equation = C - M2/2 with M2 the discrete second moment.
struct StationaryState {
  Profile profile;
  ModelParams params;
  double h_or_c = 0.0;
  double c_equation = 0.0;
  double residual = 0.0;
};

// N_h(r) = ((1-q)/q (h + r^lambda/lambda))^{1/(q-1)} at cell centers.
Profile barenblatt_profile(const ModelParams& p, double h,
                           std::shared_ptr<const RadialGrid> grid);

// Bisection on the strictly decreasing map h -> mass(N_h) until the grid mass
// matches p.mass to 1e-12 relative.  Throws BracketFailure when the target
// mass cannot be straddled (truncation radius too small).
StationaryState solve_h_star(const ModelParams& p, std::shared_ptr<const RadialGrid> grid);

// The lambda = 2 mean-field constant:
// C^{1/(1-q) - N/2} = (2 pi)^{N/2} ((1-q)/q)^{1/(q-1)} Gamma(1/(1-q) - N/2) / Gamma(1/(1-q)),
// evaluated through log-Gamma.  Requires q > (N-2)/N so the Gamma argument
// 1/(1-q) - N/2 is positive; throws GammaDomain otherwise.  The equation-level
// admissibility threshold N/(N+2) is stricter and lives in validate_params.
double meanfield_lambda2_constant(int dim, double q);

// rho_inf(r) = ((1-q)/q (C + r^2/2))^{1/(q-1)} with the constant above.
StationaryState meanfield_lambda2(const ModelParams& p,
                                  std::shared_ptr<const RadialGrid> grid);

struct FixedPointOptions {
  double damping = 0.5;  // in (0, 1]
  double tol = 1e-10;    // sup-norm relative change
  int max_iter = 10000;
};

// Damped fixed point rho <- (1-theta) rho + theta T(rho) with
// T(rho) = ((1-q)/q (V_lambda*rho + C))^{1/(q-1)}, C bisected each iterate so
// that T has unit mass.  Throws NoConvergence when max_iter is exhausted,
// BisectionFailure when no C straddles unit mass.
StationaryState meanfield_fixed_point(const ModelParams& p, const KernelMatrix& K,
                                      const FixedPointOptions& opt = {});
StationaryState meanfield_fixed_point(const ModelParams& p,
                                      std::shared_ptr<const RadialGrid> grid,
                                      const FixedPointOptions& opt = {});

// Virial cross-checks of a mean-field stationary state.
//
//   first:    2N int rho^q        vs  II := integral |x-y|^lambda rho rho
//   second:   q/(1-q) int rho^q   vs  II/lambda + C
//   combined: II                  vs  C (1-q) 2 N lambda / (q lambda - 2N(1-q))
//
// The combined identity degenerates when q lambda = 2N(1-q); combined_defined
// is false there and the combined fields are not meaningful.
struct VirialReport {
  double lhs1 = 0.0, rhs1 = 0.0, gap1 = 0.0;
  double lhs2 = 0.0, rhs2 = 0.0, gap2 = 0.0;
  double combined_lhs = 0.0, combined_rhs = 0.0, combined_gap = 0.0;
  bool combined_defined = false;
};

VirialReport virial_residual(const StationaryState& s, const KernelMatrix& K);

}  // namespace fdlab
