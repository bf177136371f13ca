#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fdlab/kernels.hpp"
#include "fdlab/params.hpp"
#include "fdlab/profile.hpp"
#include "fdlab/stationary.hpp"

namespace fdlab {

// One time sample of the scalar functionals tracked along a run.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double free_energy = 0.0;
  double fisher = 0.0;
  double rel_entropy = 0.0;
  double weighted_l2 = 0.0;
  double second_moment = 0.0;
};

// Free energy.  Drift: 1/(q-1) int u^q + int u V_lambda.  MeanField:
// 1/(q-1) int u^q + (1/(2 lambda)) integral |x-y|^lambda u u.
double free_energy(const Profile& u, const ModelParams& p);
double free_energy(const Profile& u, const ModelParams& p, const KernelMatrix& K);

// Dissipation functional int u |d_r xi|^2 with xi = q/(q-1) u^{q-1} + V.
// Assembled at interior interfaces with the donor-cell interface density, so
// the value coincides exactly with the decay rate of the discrete free energy
// under the solver's semi-discrete flux.
double fisher_information(const Profile& u, const ModelParams& p);
double fisher_information(const Profile& u, const ModelParams& p, const KernelMatrix& K);

// Relative entropy in Bregman form with phi(x) = x^q/(q-1):
// sum [phi(u) - phi(s) - phi'(s)(u - s)] V.  Equals the free-energy gap for
// mass-matched profiles; the mean-field variant adds the quadratic interaction
// term (1/(2 lambda)) integral |x-y|^lambda (u-s)(u-s) and needs the kernel.
// Throws MassMismatch when masses differ by more than 1e-8 relative.
double relative_entropy(const Profile& u, const StationaryState& s,
                        const KernelMatrix* K = nullptr);

// sum s^{q-2} (u - s)^2 V, the weighted L2 distance of the decay theorems.
double weighted_l2(const Profile& u, const StationaryState& s);

// Hardy-Poincare weights at cell centers.
//   lambda = 2:  M = 1,                M1 = N(1-q)/q
//   lambda > 2:  M = 1/(1+r^{lambda-2}),
//                M1 = (1-q)/q (N r^{2 lambda-4} + (lambda+N-2) r^{lambda-2})
//                     / (1+r^{lambda-2})^2
struct WeightPair {
  std::vector<double> m;
  std::vector<double> m1;
};
WeightPair weights_M(const RadialGrid& grid, const ModelParams& p);

// Phi_1[f] = 1/2 sum f^2 s^{2-q} V and Phi_2[f] = q sum (df/dr)^2 s M A dr over
// interior interfaces, with s the stationary density and M the weight above.
std::pair<double, double> phi_functionals(const std::vector<double>& f,
                                          const StationaryState& s);

// Named smooth map with derivative, for the integration-by-parts identity.
struct SmoothMap {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
};

// h_k(x) = (x^{k-1} - 1)/(k-1), h_k(1) = 0, derivative x^{k-2}.
SmoothMap h_k_map(double k);

// Three-term identity residual for the weighted Dirichlet form of
// alpha(w) s^{q-1}:
//   LHS = int |grad(alpha(w) s^{q-1})|^2 s M
//   T1  = int |alpha'(w)|^2 |grad w|^2 s^{2q-1} M
//   T2  = 1/(1-q) int alpha^2 |grad(s^{q-1})|^2 s M
//   T3  = int alpha^2 s^q M1
// Returns |LHS - (T1 + T2 - T3)| / (1 + |LHS|).  Every gradient uses the same
// interface stencil, so the residual measures the identity itself.
double ibp_identity_residual(const std::vector<double>& w, const SmoothMap& alpha,
                             const StationaryState& s);

// Quadratic forms of the second-order expansion around a mean-field lambda = 2
// stationary state, for perturbations g = g0(r) + g1(r) x_1/|x| carried as a
// direct-constructed Profile (density = g0, mode1 = g1; g0 may take either
// sign, it is not a density).
//
// psi1 = int rho^q g^2, psi2 = q^2 int rho |grad(rho^{q-1} g)|^2,
// psi3 = sum_i (int x_i g rho)^2.  The interaction term
// integral V_2(x-y) (g rho)(x) (g rho)(y) is computed twice: by the moment
// identity (-psi3 for weighted-mean-zero g) and through the kernel matrices.
//
// q1 = q psi1 + interaction_kernel.  q2 assembles psi2 plus the cross and
// field-energy terms of the linearized velocity q grad(rho^{q-1}g) + grad W_g,
// W_g the kernel potential of g rho.  The exact lambda = 2 identities are
// q1 = q psi1 - psi3 and q2 = psi2 - psi3; residuals against those targets and
// against the alternative normalizations (psi1 - psi3, psi2 + 3 psi3) are all
// reported.  q2_direct / q2_direct_printed are the fully discrete stencil
// assemblies of int rho |q grad(rho^{q-1}g) +- grad W_g|^2; their residuals
// decay at the stencil's second order rather than to quadrature precision.
struct PsiQReport {
  double psi1 = 0.0, psi2 = 0.0, psi3 = 0.0;
  double interaction_moment = 0.0;
  double interaction_kernel = 0.0;
  double interaction_route_gap = 0.0;

  double q1 = 0.0;
  double q1_residual_q = 0.0;      // vs q psi1 - psi3
  double q1_residual_plain = 0.0;  // vs   psi1 - psi3

  double cross_kernel = 0.0;
  double third_kernel = 0.0;
  double q2 = 0.0;
  double q2_residual_minus = 0.0;  // vs psi2 -   psi3
  double q2_residual_plus3 = 0.0;  // vs psi2 + 3 psi3

  double q2_direct = 0.0;
  double q2_direct_residual = 0.0;          // vs psi2 - psi3
  double q2_direct_printed = 0.0;
  double q2_direct_printed_residual = 0.0;  // vs psi2 + 3 psi3
};

// Throws MassNotZero when the weighted mean |sum g0 rho V| exceeds 1e-10 times
// its absolute-sum scale.
PsiQReport psi_q_forms(const Profile& g, const StationaryState& s,
                       const KernelMatrix& K);

DiagnosticsRecord make_record(double t, const Profile& u, const ModelParams& p,
                              const StationaryState& ref,
                              const KernelMatrix* K = nullptr);

}  // namespace fdlab
