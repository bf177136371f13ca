#include "fdlab/profile.hpp"

#include <cmath>
#include <cstdlib>

#include "fdlab/errors.hpp"

namespace fdlab {

Profile make_profile(std::shared_ptr<const RadialGrid> grid, std::vector<double> density,
                     std::optional<std::vector<double>> mode1) {
  if (!grid) fail(ErrorCode::BadParams, "profile needs a grid");
  if (density.size() != grid->size())
    fail(ErrorCode::GridMismatch, "density length does not match cell count");
  for (double v : density) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteState, "non-finite density value");
    if (v < 0.0) fail(ErrorCode::BadParams, "negative density value");
  }
  if (mode1) {
    if (mode1->size() != density.size())
      fail(ErrorCode::GridMismatch, "mode1 length does not match cell count");
    for (double v : *mode1)
      if (!std::isfinite(v)) fail(ErrorCode::NonFiniteState, "non-finite mode1 value");
  }
  return Profile{std::move(grid), std::move(density), std::move(mode1)};
}

void require_same_grid(const RadialGrid& a, const RadialGrid& b) {
  if (a.dim != b.dim || a.size() != b.size() || a.radius != b.radius)
    fail(ErrorCode::GridMismatch, "profiles live on different grids");
}

void require_same_grid(const Profile& a, const Profile& b) {
  if (!a.grid || !b.grid) fail(ErrorCode::BadParams, "profile needs a grid");
  require_same_grid(*a.grid, *b.grid);
}

double total_mass(const Profile& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.density.size(); ++i) m += u.density[i] * u.grid->volumes[i];
  return m;
}

double radial_moment(const Profile& u, double p) {
  if (!(p >= 0.0)) fail(ErrorCode::BadParams, "moment exponent must be nonnegative");
  double m = 0.0;
  for (std::size_t i = 0; i < u.density.size(); ++i)
    m += std::pow(u.grid->centers[i], p) * u.density[i] * u.grid->volumes[i];
  return m;
}

double l1_distance(const Profile& u, const Profile& w) {
  require_same_grid(u, w);
  double d = 0.0;
  for (std::size_t i = 0; i < u.density.size(); ++i)
    d += std::abs(u.density[i] - w.density[i]) * u.grid->volumes[i];
  return d;
}

Profile convex_mixture(const Profile& u, const Profile& w, double theta) {
  require_same_grid(u, w);
  if (!(theta >= 0.0) || !(theta <= 1.0))
    fail(ErrorCode::BadParams, "mixture weight must lie in [0, 1]");
  std::vector<double> mix(u.density.size());
  for (std::size_t i = 0; i < mix.size(); ++i)
    mix[i] = (1.0 - theta) * u.density[i] + theta * w.density[i];
  return make_profile(u.grid, std::move(mix));
}

Profile scaled_to_mass(const Profile& u, double target) {
  if (!(target > 0.0)) fail(ErrorCode::BadParams, "target mass must be positive");
  const double m = total_mass(u);
  if (!(m > 0.0)) fail(ErrorCode::ZeroProfile, "cannot rescale a massless profile");
  std::vector<double> scaled(u.density.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = u.density[i] * target / m;
  return make_profile(u.grid, std::move(scaled), u.mode1);
}

}  // namespace fdlab
