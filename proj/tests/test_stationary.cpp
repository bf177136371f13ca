#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "fdlab/grid.hpp"
#include "fdlab/kernels.hpp"
#include "fdlab/profile.hpp"
#include "fdlab/stationary.hpp"
#include "support.hpp"

using namespace fdlab;

namespace {

ModelParams params(int dim, double lambda, double q, Variant variant, double mass = 1.0) {
  ModelParams p;
  p.dim = dim;
  p.lambda = lambda;
  p.q = q;
  p.variant = variant;
  p.mass = mass;
  return validate_params(p);
}

}  // namespace

TEST_CASE("barenblatt profile matches its closed form") {
  const ModelParams p = params(2, 4.0, 0.8, Variant::Drift);
  auto g = std::make_shared<const RadialGrid>(build_grid(2, 5.0, 20));
  const double h = 3.0;
  const Profile u = barenblatt_profile(p, h, g);
  for (std::size_t i : {0u, 9u, 19u}) {
    const double r = g->centers[i];
    const double expect =
        std::pow((1.0 - p.q) / p.q * (h + std::pow(r, 4.0) / 4.0), 1.0 / (p.q - 1.0));
    CHECK(u.density[i] == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("h bisection hits the target mass and is monotone") {
  auto g = std::make_shared<const RadialGrid>(build_grid(3, 40.0, 512));
  const ModelParams p1 = params(3, 2.0, 0.8, Variant::Drift, 1.0);
  const StationaryState s1 = solve_h_star(p1, g);
  CHECK(std::abs(total_mass(s1.profile) - 1.0) <= 1e-12);
  CHECK(s1.residual <= 1e-12);

  // Mass-1 state agrees with a continuum-normalized reference for h.
  CHECK(s1.h_or_c == doctest::Approx(9.053958366348757).epsilon(1e-3));

  const ModelParams p2 = params(3, 2.0, 0.8, Variant::Drift, 2.0);
  const StationaryState s2 = solve_h_star(p2, g);
  CHECK(std::abs(total_mass(s2.profile) - 2.0) <= 2e-12);
  CHECK(s2.h_or_c < s1.h_or_c);  // more mass spreads the plateau outward
}

TEST_CASE("quadratic mean-field normalization constant") {
  // N=1, q=1/2 solves in closed form to (pi/sqrt 2)^{2/3}.
  CHECK(meanfield_lambda2_constant(1, 0.5) ==
        doctest::Approx(1.7025109607383773).epsilon(1e-14));
  // The Gamma argument 1/(1-q) - N/2 must stay positive, i.e. q > (N-2)/N.
  CHECK_ERROR_CODE(meanfield_lambda2_constant(3, 0.3), GammaDomain);
  CHECK_ERROR_CODE(meanfield_lambda2_constant(5, 0.5), GammaDomain);
  CHECK(meanfield_lambda2_constant(3, 0.8) > 0.0);
  CHECK(meanfield_lambda2_constant(3, 0.55) > 0.0);  // below q* yet Gamma-admissible
}

TEST_CASE("quadratic mean-field state carries unit mass and the drift form") {
  const ModelParams p = params(1, 2.0, 0.5, Variant::MeanField);
  auto g = std::make_shared<const RadialGrid>(build_grid(1, 100.0, 512));
  const StationaryState s = meanfield_lambda2(p, g);
  CHECK(std::abs(total_mass(s.profile) - 1.0) <= 2e-5);  // 1/r^4 tail beyond R=100

  // Same algebraic form as the drift Barenblatt at h = C.
  ModelParams pd = params(1, 2.0, 0.5, Variant::Drift);
  const Profile b = barenblatt_profile(pd, s.h_or_c, g);
  for (std::size_t i : {0u, 100u, 511u}) {
    CHECK(s.profile.density[i] == doctest::Approx(b.density[i]).epsilon(1e-15));
  }

  // c_equation restates the constant against the convolution V_2 * rho.
  const double m2 = radial_moment(s.profile, 2.0);
  CHECK(s.c_equation == doctest::Approx(s.h_or_c - 0.5 * m2).epsilon(1e-13));
}

TEST_CASE("virial identities for the quadratic closed form") {
  const ModelParams p = params(1, 2.0, 0.7, Variant::MeanField);
  auto g = std::make_shared<const RadialGrid>(build_grid(1, 80.0, 256));
  const StationaryState s = meanfield_lambda2(p, g);
  const KernelMatrix K = assemble_kernel(s.profile.grid, 2.0, 16);
  const VirialReport v = virial_residual(s, K);
  CHECK(v.gap1 <= 1e-4);
  CHECK(v.gap2 <= 1e-6);
  REQUIRE(v.combined_defined);
  CHECK(v.combined_gap <= 1e-4);
  CHECK(v.lhs1 > 0.0);
}

TEST_CASE("quartic fixed point converges and satisfies the virial checks") {
  const ModelParams p = params(2, 4.0, 0.9, Variant::MeanField);
  auto g = std::make_shared<const RadialGrid>(build_grid(2, 6.0, 128));
  const StationaryState s = meanfield_fixed_point(p, g);
  CHECK(std::abs(total_mass(s.profile) - 1.0) <= 1e-10);
  CHECK(s.h_or_c > 0.0);
  CHECK(s.residual <= 1e-8);

  const KernelMatrix K = assemble_kernel(s.profile.grid, 4.0, 64);
  const VirialReport v = virial_residual(s, K);
  CHECK(v.gap1 <= 1e-3);
  CHECK(v.gap2 <= 1e-3);
  REQUIRE(v.combined_defined);
  CHECK(v.combined_gap <= 1e-3);
}

TEST_CASE("fixed point reports exhaustion") {
  const ModelParams p = params(2, 4.0, 0.9, Variant::MeanField);
  auto g = std::make_shared<const RadialGrid>(build_grid(2, 6.0, 64));
  FixedPointOptions opt;
  opt.max_iter = 1;
  CHECK_ERROR_CODE(meanfield_fixed_point(p, g, opt), NoConvergence);
}

TEST_CASE("combined virial identity flags its degenerate line") {
  // q lambda = 2N(1-q) at N=1, lambda=2, q=1/2; the combined identity has a
  // vanishing denominator there.
  const ModelParams p = params(1, 2.0, 0.5, Variant::MeanField);
  auto g = std::make_shared<const RadialGrid>(build_grid(1, 60.0, 128));
  const StationaryState s = meanfield_lambda2(p, g);
  const KernelMatrix K = assemble_kernel(s.profile.grid, 2.0, 16);
  const VirialReport v = virial_residual(s, K);
  CHECK_FALSE(v.combined_defined);
  CHECK(v.gap1 <= 5e-2);  // fat 1/r^4 tail at q = 1/2 converges slowly in R
}
