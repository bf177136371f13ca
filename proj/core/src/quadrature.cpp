#include "fdlab/quadrature.hpp"

#include <cmath>

#include "fdlab/errors.hpp"

namespace fdlab {

GaussLegendre gauss_legendre(std::size_t order) {
  if (order < 1) fail(ErrorCode::BadParams, "quadrature order must be at least 1");
  const std::size_t n = order;
  GaussLegendre rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);

  for (std::size_t k = 1; k <= (n + 1) / 2; ++k) {
    double x = std::cos(M_PI * (static_cast<double>(k) - 0.25) /
                        (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double dj = static_cast<double>(j);
        p1 = ((2.0 * dj - 1.0) * x * p2 - (dj - 1.0) * p3) / dj;
      }
      pp = static_cast<double>(n) * (x * p1 - p2) / (x * x - 1.0);
      const double dx = -p1 / pp;
      x += dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.nodes[k - 1] = -x;
    rule.nodes[n - k] = x;
    rule.weights[k - 1] = w;
    rule.weights[n - k] = w;
  }
  return rule;
}

}  // namespace fdlab
