#include "fdlab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <vector>

#include "fdlab/diagnostics.hpp"
#include "fdlab/errors.hpp"

namespace fdlab {
namespace {

// Solve the tridiagonal system (diag, off) y = r in place.  The stiffness
// matrix has the constant mode in its kernel, so the last pivot of a
// consistent system may vanish; that component is set to zero and the caller
// projects the result back onto the constraint space.
void solve_tridiagonal(std::vector<double> diag, const std::vector<double>& off,
                       std::vector<double>& r) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = off[i - 1] / diag[i - 1];
    diag[i] -= m * off[i - 1];
    r[i] -= m * r[i - 1];
  }
  const double scale = std::abs(diag[0]) + 1.0;
  r[n - 1] = std::abs(diag[n - 1]) > 1e-14 * scale ? r[n - 1] / diag[n - 1] : 0.0;
  for (std::size_t i = n - 1; i-- > 0;) r[i] = (r[i] - off[i] * r[i + 1]) / diag[i];
}

}  // namespace

double hp_constant_formula(int dim, double q) {
  const double n = static_cast<double>(dim);
  double lo = 0.0;
  if (dim >= 3) lo = std::max((n - 4.0) / (n - 2.0), 0.0);
  if (!(q > lo) || !(q < 1.0)) {
    std::ostringstream msg;
    msg << "q = " << q << " outside (" << lo << ", 1) for dim " << dim;
    fail(ErrorCode::QOutOfRange, msg.str());
  }
  const double base = n * q - 2.0 * q - n + 4.0;
  return base * base / (8.0 * q * (1.0 - q));
}

EigenEstimate hp_estimate(const StationaryState& s, int mode, double tol,
                          std::size_t max_iter) {
  if (mode != 0) fail(ErrorCode::BadParams, "only the radial sector is estimated");
  if (!(tol > 0.0)) fail(ErrorCode::BadParams, "tolerance must be positive");
  const RadialGrid& g = *s.profile.grid;
  const std::size_t n = g.size();
  const double q = s.params.q;
  const WeightPair wm = weights_M(g, s.params);

  std::vector<double> mass(n);  // diagonal of the Phi_1 form
  for (std::size_t i = 0; i < n; ++i) {
    mass[i] = 0.5 * std::pow(s.profile.density[i], 2.0 - q) * g.volumes[i];
    if (!(mass[i] > 0.0) || !std::isfinite(mass[i]))
      fail(ErrorCode::DegenerateWeight, "Phi_1 weight vanishes or is not finite");
  }
  std::vector<double> diag(n, 0.0), off(n - 1, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double dc = g.centers[k] - g.centers[k - 1];
    const double sm = 0.5 * (s.profile.density[k] * wm.m[k] +
                             s.profile.density[k - 1] * wm.m[k - 1]);
    const double w = q * sm * g.areas[k] / dc;
    if (!(w > 0.0) || !std::isfinite(w))
      fail(ErrorCode::DegenerateWeight, "Phi_2 face weight vanishes or is not finite");
    diag[k - 1] += w;
    diag[k] += w;
    off[k - 1] = -w;
  }

  auto dot_m = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += mass[i] * a[i] * b[i];
    return acc;
  };
  auto rayleigh = [&](const std::vector<double>& x) {
    double num = 0.0;  // face form, a sum of nonnegative terms
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double d = x[i + 1] - x[i];
      num += (-off[i]) * d * d;
    }
    return num / dot_m(x, x);
  };

  // Smallest Rayleigh value orthogonal (in the Phi_1 inner product) to the
  // given normalized directions.  Re-projecting every iterate keeps roundoff
  // from reintroducing a deflated mode with a lower eigenvalue.  Tail-heavy
  // eigenvectors carry a roundoff noise floor from the wide dynamic range of
  // the weights, so after 60 iterations a relative change of 1e-6 counts as
  // converged.
  auto minimize = [&](const std::vector<std::vector<double>>& deflate,
                      std::vector<double> x, std::size_t& iterations) {
    auto project = [&](std::vector<double>& y) {
      for (const auto& b : deflate) {
        const double c = dot_m(y, b);
        for (std::size_t i = 0; i < n; ++i) y[i] -= c * b[i];
      }
    };
    project(x);
    double sigma = rayleigh(x);
    std::vector<double> rhs(n);
    for (std::size_t it = 1; it <= max_iter; ++it) {
      for (std::size_t i = 0; i < n; ++i) rhs[i] = mass[i] * x[i];
      solve_tridiagonal(diag, off, rhs);
      project(rhs);
      const double norm = std::sqrt(dot_m(rhs, rhs));
      if (!(norm > 0.0) || !std::isfinite(norm))
        fail(ErrorCode::NoConvergence, "inverse iteration collapsed");
      for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / norm;
      const double next = rayleigh(x);
      ++iterations;
      const double change = std::abs(next - sigma);
      if (change <= tol * std::abs(next) ||
          (it >= 60 && change <= 1e-6 * std::abs(next)))
        return std::pair{next, x};
      sigma = next;
    }
    std::ostringstream msg;
    msg << "eigenvalue still moving after " << max_iter << " iterations";
    fail(ErrorCode::NoConvergence, msg.str());
  };

  EigenEstimate est;
  est.grid_size = n;

  std::vector<std::vector<double>> deflate;
  std::vector<double> ones(n, 1.0);
  const double ones_norm = std::sqrt(dot_m(ones, ones));
  for (double& v : ones) v /= ones_norm;
  deflate.push_back(std::move(ones));

  auto [sigma, gap_mode] = minimize(deflate, g.centers, est.iterations);
  est.sigma = sigma;
  est.constant = 1.0 / sigma;
  est.minimizer = gap_mode;

  deflate.push_back(std::move(gap_mode));  // already mean-zero and normalized
  auto [sigma2, tail_mode] = minimize(deflate, g.centers, est.iterations);
  (void)tail_mode;
  est.a_constant = sigma2 / (2.0 * q);
  est.converged = true;
  return est;
}

MuckenhouptPair hp_weight_pair(const StationaryState& s) {
  const RadialGrid& g = *s.profile.grid;
  const double q = s.params.q;
  const WeightPair wm = weights_M(g, s.params);
  MuckenhouptPair pair;
  pair.mu.resize(g.size());
  pair.nu.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    pair.mu[i] = 0.5 * std::pow(s.profile.density[i], 2.0 - q);
    pair.nu[i] = q * s.profile.density[i] * wm.m[i];
  }
  return pair;
}

double muckenhoupt_B(const std::vector<double>& mu, const std::vector<double>& nu,
                     const RadialGrid& grid) {
  const std::size_t n = grid.size();
  if (mu.size() != n || nu.size() != n) fail(ErrorCode::GridMismatch, "weight array length");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(nu[i] > 0.0) || !std::isfinite(nu[i]))
      fail(ErrorCode::DegenerateWeight, "nu must have positive finite density");
    if (mu[i] < 0.0 || !std::isfinite(mu[i]))
      fail(ErrorCode::DegenerateWeight, "mu must be nonnegative and finite");
  }
  std::vector<double> width(n);
  for (std::size_t i = 0; i < n; ++i) width[i] = grid.interfaces[i + 1] - grid.interfaces[i];
  double tail = 0.0;
  for (std::size_t i = 0; i < n; ++i) tail += mu[i] * width[i];
  double inv = 0.0, best = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    inv += width[k - 1] / nu[k - 1];
    tail -= mu[k - 1] * width[k - 1];
    best = std::max(best, tail * inv);
  }
  return best;
}

double pinned_hardy_constant(const std::vector<double>& mu, const std::vector<double>& nu,
                             const RadialGrid& grid, double tol, std::size_t max_iter) {
  const std::size_t n = grid.size();
  if (mu.size() != n || nu.size() != n) fail(ErrorCode::GridMismatch, "weight array length");
  if (!(tol > 0.0)) fail(ErrorCode::BadParams, "tolerance must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(nu[i] > 0.0) || !std::isfinite(nu[i]))
      fail(ErrorCode::DegenerateWeight, "nu must have positive finite density");
    if (mu[i] < 0.0 || !std::isfinite(mu[i]))
      fail(ErrorCode::DegenerateWeight, "mu must be nonnegative and finite");
  }
  std::vector<double> mass(n);
  double mass_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mass[i] = mu[i] * (grid.interfaces[i + 1] - grid.interfaces[i]);
    mass_total += mass[i];
  }
  if (!(mass_total > 0.0)) fail(ErrorCode::DegenerateWeight, "mu has no mass");

  // Stiffness of int f'^2 nu with f linear between nodes and pinned to zero
  // at r = 0; the pin makes the matrix positive definite.
  std::vector<double> diag(n, 0.0), off(n - 1, 0.0);
  diag[0] += nu[0] / grid.centers[0];
  for (std::size_t k = 1; k < n; ++k) {
    const double w = 0.5 * (nu[k] + nu[k - 1]) / (grid.centers[k] - grid.centers[k - 1]);
    diag[k - 1] += w;
    diag[k] += w;
    off[k - 1] = -w;
  }

  auto rayleigh = [&](const std::vector<double>& x) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += diag[i] * x[i] * x[i];
      den += mass[i] * x[i] * x[i];
    }
    for (std::size_t i = 0; i + 1 < n; ++i) num += 2.0 * off[i] * x[i] * x[i + 1];
    return num / den;
  };

  std::vector<double> x(n, 1.0), rhs(n);
  double lam = rayleigh(x);
  for (std::size_t it = 1; it <= max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) rhs[i] = mass[i] * x[i];
    solve_tridiagonal(diag, off, rhs);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += mass[i] * rhs[i] * rhs[i];
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm))
      fail(ErrorCode::NoConvergence, "inverse iteration collapsed");
    for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / norm;
    const double next = rayleigh(x);
    if (std::abs(next - lam) <= tol * std::abs(next)) return 1.0 / next;
    lam = next;
  }
  std::ostringstream msg;
  msg << "pinned eigenvalue still moving after " << max_iter << " iterations";
  fail(ErrorCode::NoConvergence, msg.str());
}

double rhls_quotient(const Profile& u, const ModelParams& p, const KernelMatrix& K) {
  const double alpha = alpha_exponent(p.dim, p.lambda, p.q);
  if (!(alpha < 1.0)) {
    std::ostringstream msg;
    msg << "alpha = " << alpha << " must be below 1";
    fail(ErrorCode::QOutOfRange, msg.str());
  }
  const double mass = total_mass(u);
  if (!(mass > 0.0)) fail(ErrorCode::ZeroProfile, "quotient needs a profile with mass");
  double lq = 0.0;
  for (std::size_t i = 0; i < u.density.size(); ++i)
    lq += std::pow(u.density[i], p.q) * u.grid->volumes[i];
  const double numerator = interaction_energy(K, u, u);
  return numerator / (std::pow(mass, alpha) * std::pow(lq, (2.0 - alpha) / p.q));
}

double interaction_positivity(const KernelMatrix& K, const std::vector<double>& f0,
                              const std::vector<double>& f1) {
  const RadialGrid& g = *K.grid;
  const std::size_t n = g.size();
  if (f0.size() != n || f1.size() != n) fail(ErrorCode::GridMismatch, "mode array length");
  double m0 = 0.0, s0 = 0.0, m1 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m0 += f0[i] * g.volumes[i];
    s0 += std::abs(f0[i]) * g.volumes[i];
    m1 += g.centers[i] * f1[i] * g.volumes[i];
    s1 += g.centers[i] * std::abs(f1[i]) * g.volumes[i];
  }
  const double nn = static_cast<double>(g.dim);
  if (std::abs(m0) > 1e-10 * std::max(s0, 1e-300))
    fail(ErrorCode::ConstraintViolated, "mass of f0 is not zero");
  if (std::abs(m1 / nn) > 1e-10 * std::max(s1 / nn, 1e-300))
    fail(ErrorCode::ConstraintViolated, "first moment of f1 is not zero");
  return interaction_form(K, f0, f1, f0, f1);
}

}  // namespace fdlab
