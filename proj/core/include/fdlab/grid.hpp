#pragma once

#include <cstddef>
#include <vector>

#include "fdlab/params.hpp"

namespace fdlab {

// Uniform cell-centered grid on [0, R] for radially symmetric quantities in
// R^N.  M cells; interfaces r_{i+1/2} = i R/M with r_{1/2} = 0 and
// r_{M+1/2} = R exactly.
struct RadialGrid {
  int dim = 1;
  double radius = 0.0;
  std::vector<double> interfaces;  // size M+1
  std::vector<double> centers;     // size M, cell midpoints
  std::vector<double> volumes;     // size M, (S_N/N)(r_{i+1/2}^N - r_{i-1/2}^N)
  std::vector<double> areas;       // size M+1, S_N r^{N-1} at interfaces

  std::size_t size() const { return centers.size(); }
  double dr() const { return radius / static_cast<double>(centers.size()); }
};

RadialGrid build_grid(int dim, double radius, std::size_t cells);

// Radius R at which the stationary tail integral of the envelope
// ((1-q)/(q lambda) r^lambda)^{1/(q-1)} over r > R drops below
// tail_fraction * mass.  Guidance for choosing the truncation radius.
double suggest_truncation_radius(const ModelParams& p, double tail_fraction = 1e-10);

}  // namespace fdlab
