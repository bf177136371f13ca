#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "fdlab/grid.hpp"
#include "fdlab/kernels.hpp"
#include "fdlab/profile.hpp"
#include "support.hpp"

using namespace fdlab;

namespace {

Profile bump_profile(std::shared_ptr<const RadialGrid> g) {
  std::vector<double> d(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) d[i] = std::exp(-g->centers[i] * g->centers[i]);
  return make_profile(g, d);
}

}  // namespace

TEST_CASE("one-dimensional entries reduce to the two-point average") {
  // The unit sphere in one dimension is {-1, +1}, so
  //   k_pot  = (|r-s|^l + (r+s)^l) / (2l)
  //   k_force = (sign(r-s)|r-s|^{l-1} + (r+s)^{l-1}) / 2
  //   k_mom1 = (|r-s|^l - (r+s)^l) / 2.
  const double lam = 3.0;
  for (auto [r, s] : {std::pair{1.2, 0.7}, {0.3, 2.0}, {1.1, 1.1}}) {
    CAPTURE(r);
    CAPTURE(s);
    const KernelEntries e = kernel_entries(1, lam, r, s);
    const double d = std::abs(r - s), u = r + s;
    CHECK(e.pot == doctest::Approx((std::pow(d, lam) + std::pow(u, lam)) / (2.0 * lam))
                       .epsilon(1e-14));
    const double sgn = r > s ? 1.0 : (r < s ? -1.0 : 0.0);
    CHECK(e.force ==
          doctest::Approx(0.5 * (sgn * std::pow(d, lam - 1.0) + std::pow(u, lam - 1.0)))
              .epsilon(1e-14));
    CHECK(e.mom1 ==
          doctest::Approx(0.5 * (std::pow(d, lam) - std::pow(u, lam))).epsilon(1e-14));
  }
}

TEST_CASE("quadratic interaction has polynomial sphere averages") {
  // |r e1 - s w|^2 = r^2 + s^2 - 2 r s w1 averages to r^2 + s^2, and
  // <|x|^2 w1> = -2 r s / N; both exact for every dimension.
  for (int dim : {1, 2, 3, 5}) {
    CAPTURE(dim);
    for (auto [r, s] : {std::pair{0.9, 1.7}, {2.2, 0.1}}) {
      const KernelEntries e = kernel_entries(dim, 2.0, r, s);
      CHECK(e.pot == doctest::Approx(0.5 * (r * r + s * s)).epsilon(1e-13));
      CHECK(e.force == doctest::Approx(r).epsilon(1e-13));
      CHECK(e.mom1 == doctest::Approx(-2.0 * r * s / dim).epsilon(1e-13));
    }
  }
  CHECK(kernel_entries(3, 2.0, 0.0, 1.0).force == 0.0);
}

TEST_CASE("angular quadrature reference values") {
  // Pinned against an independent 800-point Gauss-Legendre evaluation of the
  // sphere averages.
  struct Ref {
    int dim;
    double lam, r, s, pot, force, mom1;
  };
  const Ref refs[] = {
      {2, 3.0, 0.6, 1.4, 1.29702869146472, 1.289158061712244, -1.8845590900183207},
      {2, 3.0, 1.0, 1.0, 1.1317684842090332, 1.6976527263135495, -2.0371832715762577},
      {2, 3.0, 2.3, 0.4, 4.3321888460199114, 5.4097725810500101, -3.2099545451262621},
      {3, 3.0, 0.6, 1.4, 1.2568380952380944, 1.1611428571428555, -1.2612664723032005},
      {3, 1.5, 1.7, 0.9, 1.735605460007912, 1.2291076974811177, -0.56643936735134548},
  };
  for (const Ref& t : refs) {
    CAPTURE(t.dim);
    CAPTURE(t.r);
    const KernelEntries e = kernel_entries(t.dim, t.lam, t.r, t.s);
    CHECK(e.pot == doctest::Approx(t.pot).epsilon(1e-12));
    CHECK(e.force == doctest::Approx(t.force).epsilon(1e-12));
    CHECK(e.mom1 == doctest::Approx(t.mom1).epsilon(1e-12));
  }
}

TEST_CASE("assembled matrices are symmetric where the kernel is") {
  auto g = std::make_shared<const RadialGrid>(build_grid(2, 3.0, 24));
  const KernelMatrix K = assemble_kernel(g, 3.0, 32);
  REQUIRE(K.n == 24);
  for (std::size_t i = 0; i < K.n; i += 5) {
    for (std::size_t j = 0; j < K.n; j += 3) {
      CHECK(K.pot(i, j) == K.pot(j, i));
      CHECK(K.mom1(i, j) == K.mom1(j, i));
    }
  }
}

TEST_CASE("quadratic potential convolution in closed form") {
  // V_2 * u = (|x|^2 + M2) / 2 for a radial u of unit mass, M2 the second
  // moment, and the force is r times the mass.
  auto g = std::make_shared<const RadialGrid>(build_grid(3, 6.0, 64));
  const Profile u = scaled_to_mass(bump_profile(g), 1.0);
  const KernelMatrix K = assemble_kernel(g, 2.0, 32);
  const double m2 = radial_moment(u, 2.0);

  const std::vector<double> W = convolve_potential(K, u);
  const std::vector<double> F = convolve_force(K, u);
  for (std::size_t i = 0; i < g->size(); i += 7) {
    const double r = g->centers[i];
    CHECK(W[i] == doctest::Approx(0.5 * (r * r + m2)).epsilon(1e-12));
    CHECK(F[i] == doctest::Approx(r).epsilon(1e-12));
  }
}

TEST_CASE("first-harmonic potential of a quadratic kernel") {
  // k_mom1 = -2 r s / N makes W1(r) = -(r/N) int s f1(s) dV exactly.
  auto g = std::make_shared<const RadialGrid>(build_grid(3, 4.0, 40));
  const KernelMatrix K = assemble_kernel(g, 2.0, 32);
  std::vector<double> f1(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) {
    f1[i] = std::exp(-g->centers[i]) * (1.0 - g->centers[i]);
  }
  double moment = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    moment += g->centers[i] * f1[i] * g->volumes[i];
  }
  const std::vector<double> W1 = potential_mode1(K, f1);
  for (std::size_t i = 0; i < g->size(); i += 9) {
    CHECK(W1[i] ==
          doctest::Approx(-g->centers[i] * moment / 3.0).epsilon(1e-12).scale(1e-12));
  }
}

TEST_CASE("interaction energy agrees with the moment identity at lambda 2") {
  // For radial u: integral |x-y|^2 u u = 2 mass M2 - 2 |int x u|^2 and the
  // first moment vanishes by symmetry.
  auto g = std::make_shared<const RadialGrid>(build_grid(2, 5.0, 48));
  const Profile u = bump_profile(g);
  const KernelMatrix K = assemble_kernel(g, 2.0, 32);
  const double energy = interaction_energy(K, u, u);
  CHECK(energy ==
        doctest::Approx(2.0 * total_mass(u) * radial_moment(u, 2.0)).epsilon(1e-12));

  // Bilinear symmetry is exact.
  const Profile w = scaled_to_mass(u, 0.3);
  CHECK(interaction_energy(K, u, w) == interaction_energy(K, w, u));

  // The sector form reproduces the radial energy when the first harmonic is
  // absent.
  const std::vector<double> zero(g->size(), 0.0);
  CHECK(interaction_form(K, u.density, zero, u.density, zero) ==
        doctest::Approx(energy).epsilon(1e-12));
}

TEST_CASE("overflowing kernel entries are rejected") {
  auto g = std::make_shared<const RadialGrid>(build_grid(2, 10.0, 16));
  CHECK_ERROR_CODE(assemble_kernel(g, 600.0, 16), QuadratureFailure);
}
