#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "doctest.h"
#include "fdlab/diagnostics.hpp"
#include "fdlab/evolve.hpp"
#include "fdlab/grid.hpp"
#include "fdlab/kernels.hpp"
#include "fdlab/profile.hpp"
#include "fdlab/stationary.hpp"
#include "support.hpp"

using namespace fdlab;

namespace {

ModelParams params(int dim, double lambda, double q, Variant variant) {
  ModelParams p;
  p.dim = dim;
  p.lambda = lambda;
  p.q = q;
  p.variant = variant;
  p.mass = 1.0;
  return validate_params(p);
}

// Mass-preserving bump: u = s (1 + eps (b - <b>_s)) with b a smooth bump and
// <.>_s the s-weighted mean, clipped nowhere for small eps.
Profile perturbed(const StationaryState& s, double eps) {
  const RadialGrid& g = *s.profile.grid;
  std::vector<double> b(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    b[i] = std::exp(-0.5 * (g.centers[i] - 1.0) * (g.centers[i] - 1.0));
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    num += b[i] * s.profile.density[i] * g.volumes[i];
    den += s.profile.density[i] * g.volumes[i];
  }
  std::vector<double> d(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    d[i] = s.profile.density[i] * (1.0 + eps * (b[i] - num / den));
  }
  return make_profile(s.profile.grid, std::move(d));
}

// The dilation family of the quadratic mean-field state is affine in r^2;
// its l=1 translation companion g1 = rho'/rho satisfies
// q rho^{q-1} g1 = -r exactly, which the tests below lean on.
std::vector<double> translation_mode(const StationaryState& s) {
  const RadialGrid& g = *s.profile.grid;
  std::vector<double> g1(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g1[i] = -g.centers[i] /
            (s.params.q * std::pow(s.profile.density[i], s.params.q - 1.0));
  }
  return g1;
}

}  // namespace

TEST_CASE("hardy-poincare weights at lambda 2 are constant") {
  const ModelParams p = params(3, 2.0, 0.8, Variant::Drift);
  const RadialGrid g = build_grid(3, 10.0, 16);
  const WeightPair w = weights_M(g, p);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(w.m[i] == 1.0);
    CHECK(w.m1[i] == doctest::Approx(3.0 * (1.0 - 0.8) / 0.8).epsilon(1e-14));
  }
}

TEST_CASE("hardy-poincare weights at lambda 4") {
  const ModelParams p = params(2, 4.0, 0.8, Variant::Drift);
  const RadialGrid g = build_grid(2, 5.0, 10);
  const WeightPair w = weights_M(g, p);
  for (std::size_t i : {0u, 4u, 9u}) {
    const double r = g.centers[i];
    const double r2 = r * r;
    CHECK(w.m[i] == doctest::Approx(1.0 / (1.0 + r2)).epsilon(1e-14));
    const double expect =
        0.25 * (2.0 * r2 * r2 + 4.0 * r2) / ((1.0 + r2) * (1.0 + r2));
    CHECK(w.m1[i] == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("bregman entropy is positive and equals the free-energy gap") {
  const ModelParams p = params(1, 2.0, 0.7, Variant::Drift);
  auto g = std::make_shared<const RadialGrid>(build_grid(1, 40.0, 512));
  const StationaryState s = solve_h_star(p, g);

  CHECK(relative_entropy(s.profile, s) == 0.0);
  const Profile u = perturbed(s, 0.2);
  const double bregman = relative_entropy(u, s);
  CHECK(bregman > 0.0);

  // For mass-matched states the defining relation q/(1-q) s^{q-1} = h - V
  // turns the Bregman form into F[u] - F[s] identically.
  const double gap = free_energy(u, p) - free_energy(s.profile, p);
  CHECK(bregman == doctest::Approx(gap).epsilon(1e-11));

  CHECK(weighted_l2(u, s) > 0.0);
  CHECK(weighted_l2(s.profile, s) == 0.0);

  const Profile heavier = scaled_to_mass(u, 1.5);
  CHECK_ERROR_CODE(relative_entropy(heavier, s), MassMismatch);
}

TEST_CASE("mean-field entropy needs the kernel and stays positive") {
  const ModelParams p = params(2, 4.0, 0.9, Variant::MeanField);
  auto g = std::make_shared<const RadialGrid>(build_grid(2, 6.0, 96));
  const KernelMatrix K = assemble_kernel(g, 4.0, 32);
  const StationaryState s = meanfield_fixed_point(p, K);
  const Profile u = perturbed(s, 0.1);
  CHECK(relative_entropy(u, s, &K) > 0.0);
  CHECK(relative_entropy(s.profile, s, &K) == 0.0);
}

TEST_CASE("fisher information tracks the energy decay rate") {
  // The quadrature for I and the flux dissipation of the scheme agree to the
  // spatial order; dt is taken small enough that the Taylor error is invisible.
  const ModelParams p = params(1, 2.0, 0.7, Variant::Drift);
  auto g = std::make_shared<const RadialGrid>(build_grid(1, 40.0, 512));
  const StationaryState s = solve_h_star(p, g);
  const Profile u = perturbed(s, 0.3);

  const double fisher = fisher_information(u, p);
  CHECK(fisher > 0.0);
  const double dt = 1e-6 * stable_dt(u, p);
  const Profile next = step(u, p, nullptr, dt);
  const double rate = (free_energy(u, p) - free_energy(next, p)) / dt;
  CHECK(rate == doctest::Approx(fisher).epsilon(2e-3));
}

TEST_CASE("h_k maps") {
  const SmoothMap h2 = h_k_map(2.0);
  CHECK(h2.name == "h_2");
  CHECK(h2.f(1.0) == 0.0);
  CHECK(h2.f(3.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(h2.df(3.0) == doctest::Approx(1.0).epsilon(1e-15));

  const SmoothMap hq = h_k_map(0.7);
  CHECK(hq.f(1.0) == 0.0);
  // Derivative against a central difference.
  const double x = 1.7, dx = 1e-6;
  CHECK(hq.df(x) ==
        doctest::Approx((hq.f(x + dx) - hq.f(x - dx)) / (2.0 * dx)).epsilon(1e-8));
  CHECK_ERROR_CODE(h_k_map(1.0), BadParams);
}

TEST_CASE("integration-by-parts identity closes at second order") {
  const ModelParams p = params(1, 2.0, 0.7, Variant::Drift);
  const SmoothMap alpha = h_k_map(p.q);
  double previous = 0.0;
  for (std::size_t cells : {512u, 1024u}) {
    auto g = std::make_shared<const RadialGrid>(build_grid(1, 40.0, cells));
    const StationaryState s = solve_h_star(p, g);
    std::vector<double> w(g->size());
    for (std::size_t i = 0; i < g->size(); ++i) {
      w[i] = 1.0 + 0.5 * std::exp(-0.25 * g->centers[i] * g->centers[i]);
    }
    const double res = ibp_identity_residual(w, alpha, s);
    CHECK(res <= 2e-4);
    if (previous > 0.0) CHECK(previous / res >= 3.0);
    previous = res;
  }
}

TEST_CASE("translation mode of the quadratic mean-field state") {
  // g = (rho'/rho) x1/|x| shifts the state; then q grad(rho^{q-1} g) = -e1
  // and the kernel force cancels it, so the direct velocity form vanishes,
  // while psi2 = int rho = 1 and psi3 = (int x1 d_1 rho)^2 = 1.
  const ModelParams p = params(3, 2.0, 0.8, Variant::MeanField);
  auto g = std::make_shared<const RadialGrid>(build_grid(3, 60.0, 512));
  const StationaryState s = meanfield_lambda2(p, g);
  const KernelMatrix K = assemble_kernel(g, 2.0, 32);

  Profile mode;
  mode.grid = g;
  mode.density.assign(g->size(), 0.0);
  mode.mode1 = translation_mode(s);
  const PsiQReport rep = psi_q_forms(mode, s, K);

  CHECK(rep.psi2 == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(rep.psi3 == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(rep.q2_direct) <= 1e-6);
  CHECK(rep.interaction_route_gap <= 1e-12);
  // interaction = -psi3 via both routes.
  CHECK(rep.interaction_kernel == doctest::Approx(-rep.psi3).epsilon(1e-10));
}

TEST_CASE("translation-mode origin deficit shrinks at first order in one dimension") {
  // In one dimension the interface assembly of psi2 misses the origin
  // half-cell, where the integrand rho |q grad(rho^{q-1}g)|^2 = rho does not
  // vanish; the deficit is rho(0) dr / 2 per side and halves with dr.
  const ModelParams p = params(1, 2.0, 0.7, Variant::MeanField);
  double deficit_coarse = 0.0;
  for (std::size_t cells : {512u, 1024u}) {
    auto g = std::make_shared<const RadialGrid>(build_grid(1, 60.0, cells));
    const StationaryState s = meanfield_lambda2(p, g);
    const KernelMatrix K = assemble_kernel(g, 2.0, 16);
    Profile mode;
    mode.grid = g;
    mode.density.assign(g->size(), 0.0);
    mode.mode1 = translation_mode(s);
    const PsiQReport rep = psi_q_forms(mode, s, K);
    CHECK(std::abs(rep.psi3 - 1.0) <= 1e-6);
    CHECK(std::abs(rep.q2_direct) <= 1e-12);
    const double deficit = 1.0 - rep.psi2;
    CHECK(deficit > 0.0);
    if (deficit_coarse > 0.0) {
      CHECK(deficit_coarse / deficit == doctest::Approx(2.0).epsilon(0.05));
    }
    deficit_coarse = deficit;
  }
}

TEST_CASE("radial-sector quadratic forms close on the kernel identities") {
  const ModelParams p = params(3, 2.0, 0.8, Variant::MeanField);
  auto g = std::make_shared<const RadialGrid>(build_grid(3, 60.0, 512));
  const StationaryState s = meanfield_lambda2(p, g);
  const KernelMatrix K = assemble_kernel(g, 2.0, 32);

  // Weighted-mean-zero radial perturbation.
  std::vector<double> g0(g->size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    g0[i] = std::exp(-0.1 * g->centers[i] * g->centers[i]);
    num += g0[i] * s.profile.density[i] * g->volumes[i];
    den += s.profile.density[i] * g->volumes[i];
  }
  for (std::size_t i = 0; i < g->size(); ++i) g0[i] -= num / den;

  Profile mode;
  mode.grid = g;
  mode.density = g0;
  const PsiQReport rep = psi_q_forms(mode, s, K);

  CHECK(rep.psi1 > 0.0);
  CHECK(rep.psi2 > 0.0);
  // Radial perturbations carry no first moment in x1.
  CHECK(rep.psi3 <= 1e-20 * rep.psi1);
  // Two routes to the interaction term agree to quadrature precision.
  CHECK(rep.interaction_route_gap <= 1e-10 * std::abs(rep.psi1));
  // q1 = q psi1 + interaction closes against q psi1 - psi3.
  CHECK(rep.q1_residual_q <= 1e-10);
  // The assembled q2 matches psi2 - psi3 at the stencil's order.
  CHECK(rep.q2_residual_minus <= 1e-2);
  CHECK(rep.q2_direct_residual <= 1e-2);
}

TEST_CASE("constrained perturbations must have weighted mean zero") {
  const ModelParams p = params(3, 2.0, 0.8, Variant::MeanField);
  auto g = std::make_shared<const RadialGrid>(build_grid(3, 40.0, 128));
  const StationaryState s = meanfield_lambda2(p, g);
  const KernelMatrix K = assemble_kernel(g, 2.0, 16);
  Profile mode;
  mode.grid = g;
  mode.density.assign(g->size(), 1.0);
  CHECK_ERROR_CODE(psi_q_forms(mode, s, K), MassNotZero);
}

TEST_CASE("records gather the tracked functionals") {
  const ModelParams p = params(1, 2.0, 0.7, Variant::Drift);
  auto g = std::make_shared<const RadialGrid>(build_grid(1, 40.0, 128));
  const StationaryState s = solve_h_star(p, g);
  const Profile u = perturbed(s, 0.1);
  const DiagnosticsRecord rec = make_record(2.5, u, p, s);
  CHECK(rec.t == 2.5);
  CHECK(rec.mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rec.fisher > 0.0);
  CHECK(rec.rel_entropy > 0.0);
  CHECK(rec.weighted_l2 > 0.0);
  CHECK(rec.second_moment == doctest::Approx(radial_moment(u, 2.0)).epsilon(1e-14));
  CHECK(rec.free_energy == doctest::Approx(free_energy(u, p)).epsilon(1e-14));
}
