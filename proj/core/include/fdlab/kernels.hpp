#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "fdlab/grid.hpp"
#include "fdlab/profile.hpp"

namespace fdlab {

// Sphere-averaged interaction kernels for V_lambda(x) = |x|^lambda / lambda,
// evaluated at pairs of grid centers.  With u(r,s,w) = |r e1 - s w|, w on the
// unit sphere, and <.> the normalized sphere average:
//
//   k_pot(r,s)  = <u^lambda> / lambda
//   k_force(r,s) = d/dr k_pot = <u^{lambda-2} (r - s w_1)>
//   k_mom1(r,s) = <u^lambda w_1>
//
// k_pot and k_mom1 are symmetric in (r,s); k_force is not.  k_mom1 feeds the
// l=1 harmonic reductions: a source f1(s) y_1/|y| convolves to the potential
// W1(r) x_1/r with W1(r_i) = (1/lambda) sum_j k_mom1[i][j] f1_j V_j.
struct KernelMatrix {
  std::shared_ptr<const RadialGrid> grid;
  double lambda = 0.0;
  std::size_t quad_order = 0;
  std::size_t n = 0;
  std::vector<double> k_pot;    // row-major n x n
  std::vector<double> k_force;  // row-major n x n
  std::vector<double> k_mom1;   // row-major n x n

  double pot(std::size_t i, std::size_t j) const { return k_pot[i * n + j]; }
  double force(std::size_t i, std::size_t j) const { return k_force[i * n + j]; }
  double mom1(std::size_t i, std::size_t j) const { return k_mom1[i * n + j]; }
};

// Pointwise kernel values at radii (r, s), N = dim.  k_force at r = 0 is 0 by
// odd symmetry.
struct KernelEntries {
  double pot = 0.0;
  double force = 0.0;
  double mom1 = 0.0;
};
KernelEntries kernel_entries(int dim, double lambda, double r, double s,
                             std::size_t order = 64);

// Dense assembly over all center pairs, O(M^2 * order).  N = 1 uses the exact
// two-point average, N >= 2 fixed-order Gauss-Legendre in the polar angle.
// Throws QuadratureFailure if any entry comes out non-finite.
KernelMatrix assemble_kernel(const RadialGrid& grid, double lambda,
                             std::size_t order = 64);
KernelMatrix assemble_kernel(std::shared_ptr<const RadialGrid> grid, double lambda,
                             std::size_t order = 64);

// W_i = sum_j k_pot[i][j] u_j V_j, the radial profile of V_lambda * u.
std::vector<double> convolve_potential(const KernelMatrix& K, const Profile& u);

// F_i = sum_j k_force[i][j] u_j V_j, the radial derivative of V_lambda * u.
std::vector<double> convolve_force(const KernelMatrix& K, const Profile& u);

// Same sums for a raw radial source; the entries may take either sign.
std::vector<double> convolve_potential(const KernelMatrix& K, const std::vector<double>& f0);
std::vector<double> convolve_force(const KernelMatrix& K, const std::vector<double>& f0);

// W1_i for an l=1 source given by amplitudes f1 at cell centers.
std::vector<double> potential_mode1(const KernelMatrix& K, const std::vector<double>& f1);

// Bilinear form  integral |x-y|^lambda u(x) w(y) dx dy  over radial densities;
// with u = w this is the interaction energy I_lambda[u].  Accumulated with a
// symmetrized summation so the value is exactly invariant under u <-> w.
double interaction_energy(const KernelMatrix& K, const Profile& u, const Profile& w);

// Same bilinear form for perturbations f = f0(r) + f1(r) x_1/r (and g alike):
// cross terms between the two harmonic sectors vanish, leaving
// lambda sum k_pot f0 g0 V V + (1/N) sum k_mom1 f1 g1 V V.
double interaction_form(const KernelMatrix& K, const std::vector<double>& f0,
                        const std::vector<double>& f1, const std::vector<double>& g0,
                        const std::vector<double>& g1);

}  // namespace fdlab
