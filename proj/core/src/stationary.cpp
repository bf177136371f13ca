#include "fdlab/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "fdlab/errors.hpp"

namespace fdlab {
namespace {

// Density ((1-q)/q (W_i + c))^{1/(q-1)} for a potential sampled at centers.
std::vector<double> density_from_potential(const std::vector<double>& w, double q,
                                           double c) {
  std::vector<double> rho(w.size());
  const double scale = (1.0 - q) / q;
  const double expo = 1.0 / (q - 1.0);
  for (std::size_t i = 0; i < w.size(); ++i) rho[i] = std::pow(scale * (w[i] + c), expo);
  return rho;
}

double grid_mass(const RadialGrid& g, const std::vector<double>& rho) {
  double m = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) m += rho[i] * g.volumes[i];
  return m;
}

// The map c -> mass(density_from_potential(w, q, c)) is strictly decreasing and
// continuous, so a sign-straddling bracket pins the multiplier down.  The
// bracket is expanded geometrically before giving up.
struct MultiplierSolve {
  double c = 0.0;
  std::vector<double> density;
};

MultiplierSolve bisect_multiplier(const RadialGrid& g, double q,
                                  const std::vector<double>& w, double target_mass,
                                  double rel_tol, ErrorCode bracket_error) {
  double lo = 1e-6, hi = 1e6;
  auto mass_at = [&](double c) { return grid_mass(g, density_from_potential(w, q, c)); };

  double m_lo = mass_at(lo);
  while (m_lo < target_mass) {
    lo /= 10.0;
    if (lo < 1e-30) fail(bracket_error, "multiplier bracket exhausted below");
    m_lo = mass_at(lo);
  }
  double m_hi = mass_at(hi);
  while (m_hi > target_mass) {
    hi *= 10.0;
    if (hi > 1e30) fail(bracket_error, "multiplier bracket exhausted above");
    m_hi = mass_at(hi);
  }

  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 500; ++iter) {
    mid = 0.5 * (lo + hi);
    const double m = mass_at(mid);
    if (std::abs(m - target_mass) <= rel_tol * target_mass) break;
    if (m > target_mass)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-16 * mid) break;
  }
  MultiplierSolve out;
  out.c = mid;
  out.density = density_from_potential(w, q, mid);
  return out;
}

std::vector<double> potential_vlambda(const RadialGrid& g, double lambda) {
  std::vector<double> w(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    w[i] = std::pow(g.centers[i], lambda) / lambda;
  return w;
}

double sup_rel_residual(const std::vector<double>& lhs, const std::vector<double>& rhs) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    num = std::max(num, std::abs(lhs[i] - rhs[i]));
    den = std::max(den, std::abs(rhs[i]));
  }
  return num / den;
}

}  // namespace

Profile barenblatt_profile(const ModelParams& p, double h,
                           std::shared_ptr<const RadialGrid> grid) {
  if (p.variant != Variant::Drift) fail(ErrorCode::BadParams, "Barenblatt profile is a drift-variant object");
  if (!(h > 0.0)) fail(ErrorCode::BadParams, "h must be positive");
  if (!grid) fail(ErrorCode::BadParams, "profile needs a grid");
  auto w = potential_vlambda(*grid, p.lambda);
  return make_profile(std::move(grid), density_from_potential(w, p.q, h));
}

StationaryState solve_h_star(const ModelParams& p, std::shared_ptr<const RadialGrid> grid) {
  if (p.variant != Variant::Drift) fail(ErrorCode::BadParams, "h_* solve is a drift-variant operation");
  if (!grid) fail(ErrorCode::BadParams, "solve needs a grid");
  const auto w = potential_vlambda(*grid, p.lambda);
  auto solve = bisect_multiplier(*grid, p.q, w, p.mass, 1e-12, ErrorCode::BracketFailure);

  StationaryState s;
  s.params = p;
  s.h_or_c = solve.c;
  s.c_equation = solve.c;

  // Self-consistency of q/(1-q) N^{q-1} = h + V at the centers.
  std::vector<double> lhs(grid->size()), rhs(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    lhs[i] = p.q / (1.0 - p.q) * std::pow(solve.density[i], p.q - 1.0);
    rhs[i] = solve.c + w[i];
  }
  s.residual = sup_rel_residual(lhs, rhs);
  s.profile = make_profile(std::move(grid), std::move(solve.density));
  return s;
}

double meanfield_lambda2_constant(int dim, double q) {
  const double n = static_cast<double>(dim);
  const double inv = 1.0 / (1.0 - q);
  const double b = inv - 0.5 * n;
  if (!(b > 0.0)) fail(ErrorCode::GammaDomain, "Gamma argument requires q > (N-2)/N");
  const double log_c = (0.5 * n * std::log(2.0 * M_PI) +
                        std::log((1.0 - q) / q) / (q - 1.0) + std::lgamma(b) -
                        std::lgamma(inv)) /
                       b;
  return std::exp(log_c);
}

StationaryState meanfield_lambda2(const ModelParams& p,
                                  std::shared_ptr<const RadialGrid> grid) {
  if (p.variant != Variant::MeanField || p.lambda != 2.0)
    fail(ErrorCode::BadParams, "closed form requires the mean-field variant at lambda = 2");
  if (!grid) fail(ErrorCode::BadParams, "profile needs a grid");

  const double c = meanfield_lambda2_constant(p.dim, p.q);
  std::vector<double> w(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i)
    w[i] = 0.5 * grid->centers[i] * grid->centers[i];

  StationaryState s;
  s.params = p;
  s.h_or_c = c;

  std::vector<double> rho = density_from_potential(w, p.q, c);
  std::vector<double> lhs(grid->size()), rhs(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    lhs[i] = p.q / (1.0 - p.q) * std::pow(rho[i], p.q - 1.0);
    rhs[i] = c + w[i];
  }
  s.residual = sup_rel_residual(lhs, rhs);
  s.profile = make_profile(std::move(grid), std::move(rho));
  s.c_equation = c - 0.5 * radial_moment(s.profile, 2.0);
  return s;
}

StationaryState meanfield_fixed_point(const ModelParams& p, const KernelMatrix& K,
                                      const FixedPointOptions& opt) {
  if (p.variant != Variant::MeanField || !(p.lambda > 2.0))
    fail(ErrorCode::BadParams, "fixed point covers the mean-field variant at lambda > 2");
  if (!(opt.damping > 0.0) || opt.damping > 1.0)
    fail(ErrorCode::BadParams, "damping must lie in (0, 1]");
  if (!K.grid) fail(ErrorCode::BadParams, "kernel needs a grid");
  const RadialGrid& g = *K.grid;

  // Initial guess with the stationary tail exponent: the envelope potential
  // r^lambda/lambda in place of the convolution, multiplier bisected for mass 1.
  auto rho = bisect_multiplier(g, p.q, potential_vlambda(g, p.lambda), 1.0, 1e-13,
                               ErrorCode::BisectionFailure)
                 .density;

  double c = 0.0;
  std::vector<double> w;
  Profile carrier{K.grid, rho, std::nullopt};
  int iter = 0;
  double change = 0.0;
  bool converged = false;
  for (; iter < opt.max_iter; ++iter) {
    carrier.density = rho;
    w = convolve_potential(K, carrier);
    auto solve = bisect_multiplier(g, p.q, w, 1.0, 1e-13, ErrorCode::BisectionFailure);
    c = solve.c;

    double sup_old = 0.0, sup_diff = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      const double next = (1.0 - opt.damping) * rho[i] + opt.damping * solve.density[i];
      sup_old = std::max(sup_old, std::abs(rho[i]));
      sup_diff = std::max(sup_diff, std::abs(next - rho[i]));
      rho[i] = next;
    }
    change = sup_diff / sup_old;
    if (change <= opt.tol) {
      converged = true;
      break;
    }
  }

  carrier.density = rho;
  w = convolve_potential(K, carrier);
  std::vector<double> lhs(g.size()), rhs(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    lhs[i] = p.q / (1.0 - p.q) * std::pow(rho[i], p.q - 1.0);
    rhs[i] = w[i] + c;
  }
  const double residual = sup_rel_residual(lhs, rhs);

  if (!converged) {
    std::ostringstream os;
    os << "fixed point stalled after " << opt.max_iter << " iterations, last change "
       << change << ", equation residual " << residual;
    fail(ErrorCode::NoConvergence, os.str());
  }

  StationaryState s;
  s.params = p;
  s.h_or_c = c;
  s.c_equation = c;
  s.residual = residual;
  s.profile = make_profile(K.grid, std::move(rho));
  return s;
}

StationaryState meanfield_fixed_point(const ModelParams& p,
                                      std::shared_ptr<const RadialGrid> grid,
                                      const FixedPointOptions& opt) {
  if (!grid) fail(ErrorCode::BadParams, "fixed point needs a grid");
  return meanfield_fixed_point(p, assemble_kernel(std::move(grid), p.lambda), opt);
}

VirialReport virial_residual(const StationaryState& s, const KernelMatrix& K) {
  const ModelParams& p = s.params;
  if (p.variant != Variant::MeanField)
    fail(ErrorCode::BadParams, "virial identities concern mean-field states");

  const RadialGrid& g = *s.profile.grid;
  double int_rho_q = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    int_rho_q += std::pow(s.profile.density[i], p.q) * g.volumes[i];

  const double n = static_cast<double>(p.dim);
  const double ii = interaction_energy(K, s.profile, s.profile);

  VirialReport r;
  r.lhs1 = 2.0 * n * int_rho_q;
  r.rhs1 = ii;
  r.gap1 = std::abs(r.lhs1 - r.rhs1) / std::max(std::abs(r.lhs1), std::abs(r.rhs1));

  r.lhs2 = p.q / (1.0 - p.q) * int_rho_q;
  r.rhs2 = ii / p.lambda + s.c_equation;
  r.gap2 = std::abs(r.lhs2 - r.rhs2) / std::max(std::abs(r.lhs2), std::abs(r.rhs2));

  const double denom = p.q * p.lambda - 2.0 * n * (1.0 - p.q);
  r.combined_defined = std::abs(denom) > 1e-12 * (p.q * p.lambda + 2.0 * n * (1.0 - p.q));
  if (r.combined_defined) {
    r.combined_lhs = ii;
    r.combined_rhs = s.c_equation * (1.0 - p.q) * 2.0 * n * p.lambda / denom;
    r.combined_gap = std::abs(r.combined_lhs - r.combined_rhs) /
                     std::max(std::abs(r.combined_lhs), std::abs(r.combined_rhs));
  }
  return r;
}

}  // namespace fdlab
