#pragma once

#include <cstddef>
#include <vector>

namespace fdlab {

// Gauss-Legendre rule on [-1, 1], nodes in ascending order.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes are the roots of P_n found by Newton iteration on the three-term
// recurrence; weights w_k = 2 / ((1 - x_k^2) P_n'(x_k)^2).
GaussLegendre gauss_legendre(std::size_t order);

}  // namespace fdlab
