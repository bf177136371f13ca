#include "fdlab/kernels.hpp"

#include <cmath>

#include "fdlab/errors.hpp"
#include "fdlab/quadrature.hpp"

namespace fdlab {
namespace {

// Polar-angle rule for the normalized sphere average over S^{N-1}, N >= 2:
// theta = pi (1+x)/2 maps the Gauss-Legendre interval onto (0, pi).  Storing
// sin^2(theta/2) keeps |r e1 - s w|^2 = (r-s)^2 + 4 r s sin^2(theta/2) free of
// cancellation near theta = 0.  Weights carry sin^{N-2} theta and are
// normalized to sum to 1, so constants average exactly.
struct AngularRule {
  std::vector<double> t;   // cos(theta_k)
  std::vector<double> s2;  // sin^2(theta_k / 2)
  std::vector<double> w;   // normalized, sum = 1
};

AngularRule make_angular_rule(int dim, std::size_t order) {
  const GaussLegendre gl = gauss_legendre(order);
  AngularRule a;
  a.t.resize(order);
  a.s2.resize(order);
  a.w.resize(order);
  double wsum = 0.0;
  for (std::size_t k = 0; k < order; ++k) {
    const double x = gl.nodes[k];
    const double half = std::sin(M_PI * (1.0 + x) / 4.0);
    const double sin_theta = std::cos(M_PI * x / 2.0);
    a.s2[k] = half * half;
    a.t[k] = 1.0 - 2.0 * a.s2[k];
    a.w[k] = gl.weights[k] * std::pow(sin_theta, static_cast<double>(dim - 2));
    wsum += a.w[k];
  }
  for (double& w : a.w) w /= wsum;
  return a;
}

struct PairValues {
  double pot_l = 0.0;  // <u^lambda>, no 1/lambda
  double force_rs = 0.0;
  double force_sr = 0.0;
  double mom1 = 0.0;
};

PairValues eval_n1(double lambda, double r, double s) {
  const double d = std::abs(r - s);
  const double e = r + s;
  const double dl = std::pow(d, lambda);
  const double el = std::pow(e, lambda);
  const double dl1 = std::pow(d, lambda - 1.0);
  const double el1 = std::pow(e, lambda - 1.0);
  const double sgn = (r > s) ? 1.0 : (r < s ? -1.0 : 0.0);
  PairValues v;
  v.pot_l = 0.5 * (dl + el);
  v.mom1 = 0.5 * (dl - el);
  v.force_rs = 0.5 * (sgn * dl1 + el1);
  v.force_sr = 0.5 * (-sgn * dl1 + el1);
  return v;
}

// One node's contribution; summed over mirrored node pairs so the odd-in-t
// pieces cancel before touching the accumulators.
PairValues eval_angular(const AngularRule& a, double lambda, double r, double s) {
  const double rs4 = 4.0 * r * s;
  const double dd = (r - s) * (r - s);
  const std::size_t n = a.t.size();
  PairValues v;
  auto node = [&](std::size_t k, PairValues& acc) {
    const double u = dd + rs4 * a.s2[k];
    const double up = std::pow(u, 0.5 * lambda - 1.0);
    const double ul = up * u;
    const double w = a.w[k];
    acc.pot_l += w * ul;
    acc.mom1 += w * ul * a.t[k];
    acc.force_rs += w * up * (r - s * a.t[k]);
    acc.force_sr += w * up * (s - r * a.t[k]);
  };
  for (std::size_t p = 0; p < n / 2; ++p) {
    PairValues pair;
    node(p, pair);
    node(n - 1 - p, pair);
    v.pot_l += pair.pot_l;
    v.mom1 += pair.mom1;
    v.force_rs += pair.force_rs;
    v.force_sr += pair.force_sr;
  }
  if (n % 2 == 1) node(n / 2, v);
  return v;
}

}  // namespace

KernelEntries kernel_entries(int dim, double lambda, double r, double s,
                             std::size_t order) {
  if (dim < 1) fail(ErrorCode::BadParams, "dimension must be a positive integer");
  if (!(lambda > 0.0)) fail(ErrorCode::LambdaOutOfRange, "lambda must be positive");
  PairValues v;
  if (dim == 1) {
    v = eval_n1(lambda, r, s);
  } else {
    const AngularRule a = make_angular_rule(dim, order);
    v = eval_angular(a, lambda, r, s);
  }
  KernelEntries e;
  e.pot = v.pot_l / lambda;
  e.force = (r == 0.0) ? 0.0 : v.force_rs;
  e.mom1 = v.mom1;
  return e;
}

KernelMatrix assemble_kernel(std::shared_ptr<const RadialGrid> grid, double lambda,
                             std::size_t order) {
  if (!grid) fail(ErrorCode::BadParams, "kernel assembly needs a grid");
  if (!(lambda > 0.0)) fail(ErrorCode::LambdaOutOfRange, "lambda must be positive");

  KernelMatrix K;
  K.grid = grid;
  K.lambda = lambda;
  K.quad_order = order;
  K.n = grid->size();
  K.k_pot.assign(K.n * K.n, 0.0);
  K.k_force.assign(K.n * K.n, 0.0);
  K.k_mom1.assign(K.n * K.n, 0.0);

  const bool n1 = grid->dim == 1;
  AngularRule rule;
  if (!n1) rule = make_angular_rule(grid->dim, order);

  for (std::size_t i = 0; i < K.n; ++i) {
    const double r = grid->centers[i];
    for (std::size_t j = i; j < K.n; ++j) {
      const double s = grid->centers[j];
      const PairValues v = n1 ? eval_n1(lambda, r, s) : eval_angular(rule, lambda, r, s);
      K.k_pot[i * K.n + j] = v.pot_l / lambda;
      K.k_pot[j * K.n + i] = v.pot_l / lambda;
      K.k_mom1[i * K.n + j] = v.mom1;
      K.k_mom1[j * K.n + i] = v.mom1;
      K.k_force[i * K.n + j] = v.force_rs;
      K.k_force[j * K.n + i] = v.force_sr;
    }
  }

  for (double x : K.k_pot)
    if (!std::isfinite(x)) fail(ErrorCode::QuadratureFailure, "non-finite potential kernel entry");
  for (double x : K.k_force)
    if (!std::isfinite(x)) fail(ErrorCode::QuadratureFailure, "non-finite force kernel entry");
  for (double x : K.k_mom1)
    if (!std::isfinite(x)) fail(ErrorCode::QuadratureFailure, "non-finite moment kernel entry");
  return K;
}

KernelMatrix assemble_kernel(const RadialGrid& grid, double lambda, std::size_t order) {
  return assemble_kernel(std::make_shared<RadialGrid>(grid), lambda, order);
}

namespace {

void require_kernel_grid(const KernelMatrix& K, const Profile& u) {
  if (!K.grid || !u.grid) fail(ErrorCode::BadParams, "kernel and profile need grids");
  require_same_grid(*K.grid, *u.grid);
}

}  // namespace

std::vector<double> convolve_potential(const KernelMatrix& K, const Profile& u) {
  require_kernel_grid(K, u);
  return convolve_potential(K, u.density);
}

std::vector<double> convolve_force(const KernelMatrix& K, const Profile& u) {
  require_kernel_grid(K, u);
  return convolve_force(K, u.density);
}

std::vector<double> convolve_potential(const KernelMatrix& K, const std::vector<double>& f0) {
  if (f0.size() != K.n) fail(ErrorCode::GridMismatch, "source length does not match kernel");
  std::vector<double> out(K.n, 0.0);
  for (std::size_t i = 0; i < K.n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < K.n; ++j)
      acc += K.k_pot[i * K.n + j] * f0[j] * K.grid->volumes[j];
    out[i] = acc;
  }
  return out;
}

std::vector<double> convolve_force(const KernelMatrix& K, const std::vector<double>& f0) {
  if (f0.size() != K.n) fail(ErrorCode::GridMismatch, "source length does not match kernel");
  std::vector<double> out(K.n, 0.0);
  for (std::size_t i = 0; i < K.n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < K.n; ++j)
      acc += K.k_force[i * K.n + j] * f0[j] * K.grid->volumes[j];
    out[i] = acc;
  }
  return out;
}

std::vector<double> potential_mode1(const KernelMatrix& K, const std::vector<double>& f1) {
  if (f1.size() != K.n) fail(ErrorCode::GridMismatch, "mode1 length does not match kernel");
  std::vector<double> out(K.n, 0.0);
  for (std::size_t i = 0; i < K.n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < K.n; ++j)
      acc += K.k_mom1[i * K.n + j] * f1[j] * K.grid->volumes[j];
    out[i] = acc / K.lambda;
  }
  return out;
}

double interaction_energy(const KernelMatrix& K, const Profile& u, const Profile& w) {
  require_kernel_grid(K, u);
  require_kernel_grid(K, w);
  std::vector<double> a(K.n), b(K.n);
  for (std::size_t i = 0; i < K.n; ++i) {
    a[i] = u.density[i] * K.grid->volumes[i];
    b[i] = w.density[i] * K.grid->volumes[i];
  }
  // a_i b_j + b_i a_j makes the sum exactly invariant under u <-> w.
  double acc = 0.0;
  for (std::size_t i = 0; i < K.n; ++i) {
    acc += K.k_pot[i * K.n + i] * a[i] * b[i];
    for (std::size_t j = i + 1; j < K.n; ++j)
      acc += K.k_pot[i * K.n + j] * (a[i] * b[j] + b[i] * a[j]);
  }
  return K.lambda * acc;
}

double interaction_form(const KernelMatrix& K, const std::vector<double>& f0,
                        const std::vector<double>& f1, const std::vector<double>& g0,
                        const std::vector<double>& g1) {
  if (f0.size() != K.n || f1.size() != K.n || g0.size() != K.n || g1.size() != K.n)
    fail(ErrorCode::GridMismatch, "perturbation length does not match kernel");
  std::vector<double> a(K.n), b(K.n), c(K.n), d(K.n);
  for (std::size_t i = 0; i < K.n; ++i) {
    const double v = K.grid->volumes[i];
    a[i] = f0[i] * v;
    b[i] = g0[i] * v;
    c[i] = f1[i] * v;
    d[i] = g1[i] * v;
  }
  double radial = 0.0, mode = 0.0;
  for (std::size_t i = 0; i < K.n; ++i) {
    radial += K.k_pot[i * K.n + i] * a[i] * b[i];
    mode += K.k_mom1[i * K.n + i] * c[i] * d[i];
    for (std::size_t j = i + 1; j < K.n; ++j) {
      radial += K.k_pot[i * K.n + j] * (a[i] * b[j] + b[i] * a[j]);
      mode += K.k_mom1[i * K.n + j] * (c[i] * d[j] + d[i] * c[j]);
    }
  }
  return K.lambda * radial + mode / static_cast<double>(K.grid->dim);
}

}  // namespace fdlab
