#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "fdlab/grid.hpp"

namespace fdlab {

// Cell-averaged radial density.  mode1, when present, carries the amplitude
// g1(r_i) of an l=1 spherical-harmonic perturbation g0(r) + g1(r) x_1/|x|;
// it may take either sign, the density may not.
struct Profile {
  std::shared_ptr<const RadialGrid> grid;
  std::vector<double> density;
  std::optional<std::vector<double>> mode1;
};

Profile make_profile(std::shared_ptr<const RadialGrid> grid, std::vector<double> density,
                     std::optional<std::vector<double>> mode1 = std::nullopt);

// Throws GridMismatch unless both profiles live on structurally identical
// grids (dimension, cell count, radius).
void require_same_grid(const Profile& a, const Profile& b);
void require_same_grid(const RadialGrid& a, const RadialGrid& b);

// Midpoint-rule integrals; exact for the cell-average semantics.
double total_mass(const Profile& u);
double radial_moment(const Profile& u, double p);  // sum r_i^p u_i V_i
double l1_distance(const Profile& u, const Profile& w);

// (1 - theta) u + theta w for theta in [0, 1].
Profile convex_mixture(const Profile& u, const Profile& w, double theta);

// u rescaled so its grid mass equals target > 0.  Throws ZeroProfile when u
// carries no mass to scale.
Profile scaled_to_mass(const Profile& u, double target);

}  // namespace fdlab
