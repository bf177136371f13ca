#include <cmath>
#include <cstddef>

#include "doctest.h"
#include "fdlab/quadrature.hpp"

using namespace fdlab;

namespace {

double integrate(const GaussLegendre& g, double (*f)(double)) {
  double acc = 0.0;
  for (std::size_t k = 0; k < g.nodes.size(); ++k) acc += g.weights[k] * f(g.nodes[k]);
  return acc;
}

}  // namespace

TEST_CASE("small rules match their closed forms") {
  const GaussLegendre g2 = gauss_legendre(2);
  REQUIRE(g2.nodes.size() == 2);
  const double inv_sqrt3 = 0.57735026918962576451;
  CHECK(g2.nodes[0] == doctest::Approx(-inv_sqrt3).epsilon(1e-14));
  CHECK(g2.nodes[1] == doctest::Approx(inv_sqrt3).epsilon(1e-14));
  CHECK(g2.weights[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g2.weights[1] == doctest::Approx(1.0).epsilon(1e-14));

  const GaussLegendre g3 = gauss_legendre(3);
  REQUIRE(g3.nodes.size() == 3);
  CHECK(g3.nodes[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(g3.nodes[2] == doctest::Approx(std::sqrt(0.6)).epsilon(1e-14));
  CHECK(g3.weights[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
  CHECK(g3.weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("nodes ascend symmetrically and weights are positive") {
  for (std::size_t order : {1u, 2u, 7u, 16u, 64u}) {
    CAPTURE(order);
    const GaussLegendre g = gauss_legendre(order);
    REQUIRE(g.nodes.size() == order);
    REQUIRE(g.weights.size() == order);
    double wsum = 0.0;
    for (std::size_t k = 0; k < order; ++k) {
      if (k > 0) CHECK(g.nodes[k] > g.nodes[k - 1]);
      CHECK(g.weights[k] > 0.0);
      CHECK(g.nodes[k] == doctest::Approx(-g.nodes[order - 1 - k]).epsilon(1e-14));
      wsum += g.weights[k];
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("a rule with n nodes is exact through degree 2n-1") {
  const GaussLegendre g4 = gauss_legendre(4);
  // int x^6 over [-1,1] = 2/7; degree 6 <= 7.
  CHECK(integrate(g4, [](double x) { return std::pow(x, 6.0); }) ==
        doctest::Approx(2.0 / 7.0).epsilon(1e-15));
  // Odd powers vanish by the node symmetry.
  CHECK(std::abs(integrate(g4, [](double x) { return std::pow(x, 7.0); })) < 1e-16);
}

TEST_CASE("smooth non-polynomial integrand at working order") {
  const GaussLegendre g = gauss_legendre(64);
  CHECK(integrate(g, [](double x) { return std::cos(x); }) ==
        doctest::Approx(2.0 * std::sin(1.0)).epsilon(1e-15));
}
