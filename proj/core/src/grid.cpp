#include "fdlab/grid.hpp"

#include <cmath>

#include "fdlab/errors.hpp"

namespace fdlab {

RadialGrid build_grid(int dim, double radius, std::size_t cells) {
  if (dim < 1) fail(ErrorCode::BadGridSpec, "dimension must be a positive integer");
  if (!(radius > 0.0) || !std::isfinite(radius))
    fail(ErrorCode::BadGridSpec, "radius must be positive and finite");
  if (cells < 2) fail(ErrorCode::BadGridSpec, "need at least 2 cells");

  RadialGrid g;
  g.dim = dim;
  g.radius = radius;
  g.interfaces.resize(cells + 1);
  g.centers.resize(cells);
  g.volumes.resize(cells);
  g.areas.resize(cells + 1);

  const double dr = radius / static_cast<double>(cells);
  for (std::size_t i = 0; i <= cells; ++i)
    g.interfaces[i] = static_cast<double>(i) * dr;
  g.interfaces[cells] = radius;

  const double sn = sphere_area(dim);
  const double n = static_cast<double>(dim);
  for (std::size_t i = 0; i <= cells; ++i)
    g.areas[i] = sn * std::pow(g.interfaces[i], n - 1.0);
  for (std::size_t i = 0; i < cells; ++i) {
    g.centers[i] = 0.5 * (g.interfaces[i] + g.interfaces[i + 1]);
    g.volumes[i] =
        sn / n * (std::pow(g.interfaces[i + 1], n) - std::pow(g.interfaces[i], n));
  }
  return g;
}

double suggest_truncation_radius(const ModelParams& p, double tail_fraction) {
  if (!(tail_fraction > 0.0) || !(tail_fraction < 1.0))
    fail(ErrorCode::BadParams, "tail fraction must lie in (0,1)");
  const double n = static_cast<double>(p.dim);
  // Envelope tail: integrating S_N c r^{p+1-1} dr with c = ((1-q)/(q lambda))^{1/(q-1)}
  // and p = lambda/(q-1) + N - 1 gives S_N c R^{p+1}/(-p-1); p+1 < 0 exactly in
  // the admissible range q > N/(N+lambda).
  const double pexp = p.lambda / (p.q - 1.0) + n - 1.0;
  const double c = std::pow((1.0 - p.q) / (p.q * p.lambda), 1.0 / (p.q - 1.0));
  const double target = tail_fraction * p.mass;
  const double rate = -(pexp + 1.0);
  return std::pow(target * rate / (sphere_area(p.dim) * c), 1.0 / (pexp + 1.0));
}

}  // namespace fdlab
