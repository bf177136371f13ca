#include "fdlab/diagnostics.hpp"

#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "fdlab/errors.hpp"

namespace fdlab {
namespace {

double phi_of(double x, double q) { return std::pow(x, q) / (q - 1.0); }

double phi_prime(double x, double q) { return q / (q - 1.0) * std::pow(x, q - 1.0); }

std::vector<double> drift_potential(const RadialGrid& g, double lambda) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::pow(g.centers[i], lambda) / lambda;
  return v;
}

// xi_i = q/(q-1) u_i^{q-1} + pot_i, the velocity potential of the flow.
std::vector<double> xi_centers(const Profile& u, double q, const std::vector<double>& pot) {
  std::vector<double> xi(u.density.size());
  for (std::size_t i = 0; i < xi.size(); ++i)
    xi[i] = phi_prime(u.density[i], q) + pot[i];
  return xi;
}

// sum over interior interfaces of A u_up v^2 dc, v the outward velocity
// -(xi_{i+1} - xi_i)/dc and u_up the donor cell.  Matches the semi-discrete
// energy decay of the upwind flux exactly.
double fisher_from_xi(const Profile& u, const std::vector<double>& xi) {
  const RadialGrid& g = *u.grid;
  double acc = 0.0;
  for (std::size_t k = 1; k < g.size(); ++k) {
    const double dc = g.centers[k] - g.centers[k - 1];
    const double v = -(xi[k] - xi[k - 1]) / dc;
    const double up = v > 0.0 ? u.density[k - 1] : u.density[k];
    if (up > 0.0) acc += g.areas[k] * up * v * v * dc;
  }
  return acc;
}

double cell_sum(const RadialGrid& g, const std::vector<double>& integrand) {
  double acc = 0.0;
  for (std::size_t i = 0; i < integrand.size(); ++i) acc += integrand[i] * g.volumes[i];
  return acc;
}

// sum over interior interfaces of avg(w) da db A dc, the shared stencil for
// every weighted Dirichlet form in this translation unit.
double interface_form(const RadialGrid& g, const std::vector<double>& w,
                      const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t k = 1; k < g.size(); ++k) {
    const double dc = g.centers[k] - g.centers[k - 1];
    const double da = (a[k] - a[k - 1]) / dc;
    const double db = (b[k] - b[k - 1]) / dc;
    const double wk = 0.5 * (w[k] + w[k - 1]);
    acc += wk * da * db * g.areas[k] * dc;
  }
  return acc;
}

void require_meanfield_kernel(const ModelParams& p, const KernelMatrix* K) {
  if (p.variant == Variant::MeanField && K == nullptr)
    fail(ErrorCode::BadParams, "mean-field diagnostics need an assembled kernel");
}

}  // namespace

double free_energy(const Profile& u, const ModelParams& p) {
  if (p.variant != Variant::Drift)
    fail(ErrorCode::BadParams, "kernel-free free energy is the drift form");
  const RadialGrid& g = *u.grid;
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double vl = std::pow(g.centers[i], p.lambda) / p.lambda;
    acc += (phi_of(u.density[i], p.q) + u.density[i] * vl) * g.volumes[i];
  }
  return acc;
}

double free_energy(const Profile& u, const ModelParams& p, const KernelMatrix& K) {
  if (p.variant != Variant::MeanField) return free_energy(u, p);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.grid->size(); ++i)
    acc += phi_of(u.density[i], p.q) * u.grid->volumes[i];
  return acc + interaction_energy(K, u, u) / (2.0 * p.lambda);
}

double fisher_information(const Profile& u, const ModelParams& p) {
  if (p.variant != Variant::Drift)
    fail(ErrorCode::BadParams, "kernel-free Fisher information is the drift form");
  return fisher_from_xi(u, xi_centers(u, p.q, drift_potential(*u.grid, p.lambda)));
}

double fisher_information(const Profile& u, const ModelParams& p, const KernelMatrix& K) {
  if (p.variant != Variant::MeanField) return fisher_information(u, p);
  return fisher_from_xi(u, xi_centers(u, p.q, convolve_potential(K, u)));
}

double relative_entropy(const Profile& u, const StationaryState& s, const KernelMatrix* K) {
  require_same_grid(u, s.profile);
  const ModelParams& p = s.params;
  const double mu = total_mass(u);
  const double ms = total_mass(s.profile);
  if (std::abs(mu - ms) > 1e-8 * std::max(std::abs(ms), 1e-300)) {
    std::ostringstream msg;
    msg << "masses " << mu << " and " << ms << " differ beyond 1e-8";
    fail(ErrorCode::MassMismatch, msg.str());
  }
  const RadialGrid& g = *u.grid;
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double ui = u.density[i];
    const double si = s.profile.density[i];
    acc += (phi_of(ui, p.q) - phi_of(si, p.q) - phi_prime(si, p.q) * (ui - si)) * g.volumes[i];
  }
  if (p.variant == Variant::MeanField) {
    require_meanfield_kernel(p, K);
    std::vector<double> delta(g.size()), none(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) delta[i] = u.density[i] - s.profile.density[i];
    acc += interaction_form(*K, delta, none, delta, none) / (2.0 * p.lambda);
  }
  return acc;
}

double weighted_l2(const Profile& u, const StationaryState& s) {
  require_same_grid(u, s.profile);
  const double q = s.params.q;
  double acc = 0.0;
  for (std::size_t i = 0; i < u.grid->size(); ++i) {
    const double d = u.density[i] - s.profile.density[i];
    acc += std::pow(s.profile.density[i], q - 2.0) * d * d * u.grid->volumes[i];
  }
  return acc;
}

WeightPair weights_M(const RadialGrid& grid, const ModelParams& p) {
  WeightPair w;
  const std::size_t n = grid.size();
  w.m.assign(n, 1.0);
  w.m1.assign(n, 0.0);
  const double ratio = (1.0 - p.q) / p.q;
  if (p.lambda == 2.0) {
    const double c1 = static_cast<double>(p.dim) * ratio;
    for (std::size_t i = 0; i < n; ++i) w.m1[i] = c1;
    return w;
  }
  const double nn = static_cast<double>(p.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.centers[i];
    const double rl = std::pow(r, p.lambda - 2.0);
    const double den = 1.0 + rl;
    w.m[i] = 1.0 / den;
    w.m1[i] = ratio * (nn * rl * rl + (p.lambda + nn - 2.0) * rl) / (den * den);
  }
  return w;
}

std::pair<double, double> phi_functionals(const std::vector<double>& f,
                                          const StationaryState& s) {
  const RadialGrid& g = *s.profile.grid;
  if (f.size() != g.size()) fail(ErrorCode::GridMismatch, "test function length");
  const double q = s.params.q;
  const WeightPair w = weights_M(g, s.params);
  std::vector<double> p1(g.size()), wm(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    p1[i] = 0.5 * f[i] * f[i] * std::pow(s.profile.density[i], 2.0 - q);
    wm[i] = s.profile.density[i] * w.m[i];
  }
  const double phi1 = cell_sum(g, p1);
  const double phi2 = q * interface_form(g, wm, f, f);
  return {phi1, phi2};
}

SmoothMap h_k_map(double k) {
  if (k == 1.0) fail(ErrorCode::BadParams, "h_k is defined for k != 1");
  SmoothMap m;
  std::ostringstream name;
  name << "h_" << k;
  m.name = name.str();
  m.f = [k](double x) { return (std::pow(x, k - 1.0) - 1.0) / (k - 1.0); };
  m.df = [k](double x) { return std::pow(x, k - 2.0); };
  return m;
}

double ibp_identity_residual(const std::vector<double>& w, const SmoothMap& alpha,
                             const StationaryState& s) {
  const RadialGrid& g = *s.profile.grid;
  if (w.size() != g.size()) fail(ErrorCode::GridMismatch, "field length");
  const double q = s.params.q;
  const WeightPair wt = weights_M(g, s.params);
  const std::size_t n = g.size();

  std::vector<double> sq1(n), big(n), a(n), ap(n), sm(n), t1w(n), t2w(n), t3c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double si = s.profile.density[i];
    sq1[i] = std::pow(si, q - 1.0);
    a[i] = alpha.f(w[i]);
    ap[i] = alpha.df(w[i]);
    big[i] = a[i] * sq1[i];
    sm[i] = si * wt.m[i];
    t1w[i] = ap[i] * ap[i] * std::pow(si, 2.0 * q - 1.0) * wt.m[i];
    t2w[i] = a[i] * a[i] * sm[i];
    t3c[i] = a[i] * a[i] * std::pow(si, q) * wt.m1[i];
  }
  const double lhs = interface_form(g, sm, big, big);
  const double t1 = interface_form(g, t1w, w, w);
  const double t2 = interface_form(g, t2w, sq1, sq1) / (1.0 - q);
  const double t3 = cell_sum(g, t3c);
  return std::abs(lhs - (t1 + t2 - t3)) / (1.0 + std::abs(lhs));
}

PsiQReport psi_q_forms(const Profile& g, const StationaryState& s, const KernelMatrix& K) {
  require_same_grid(g, s.profile);
  const ModelParams& p = s.params;
  if (p.variant != Variant::MeanField || p.lambda != 2.0)
    fail(ErrorCode::BadParams, "quadratic forms are defined at the mean-field lambda = 2 state");
  const RadialGrid& gr = *s.profile.grid;
  const std::size_t n = gr.size();
  const double q = p.q;
  const double nn = static_cast<double>(p.dim);
  const std::vector<double>& rho = s.profile.density;
  const std::vector<double>& g0 = g.density;
  const std::vector<double> g1 = g.mode1 ? *g.mode1 : std::vector<double>(n, 0.0);

  double m0 = 0.0, m0_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m0 += g0[i] * rho[i] * gr.volumes[i];
    m0_scale += std::abs(g0[i]) * rho[i] * gr.volumes[i];
  }
  if (m0_scale > 0.0 && std::abs(m0) > 1e-10 * m0_scale)
    fail(ErrorCode::MassNotZero, "radial perturbation must have weighted mean zero");

  PsiQReport rep;
  std::vector<double> av(n), bv(n), f0(n), f1(n), p1c(n);
  double tmom = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rq1 = std::pow(rho[i], q - 1.0);
    av[i] = rq1 * g0[i];
    bv[i] = rq1 * g1[i];
    f0[i] = rho[i] * g0[i];
    f1[i] = rho[i] * g1[i];
    p1c[i] = std::pow(rho[i], q) * (g0[i] * g0[i] + g1[i] * g1[i] / nn);
    tmom += gr.centers[i] * f1[i] * gr.volumes[i];
    mass += rho[i] * gr.volumes[i];
  }
  tmom /= nn;
  rep.psi1 = cell_sum(gr, p1c);
  rep.psi3 = tmom * tmom;
  rep.interaction_moment = -rep.psi3;
  rep.interaction_kernel = interaction_form(K, f0, f1, f0, f1) / p.lambda;
  rep.interaction_route_gap =
      std::abs(rep.interaction_kernel - rep.interaction_moment) /
      (1.0 + std::abs(rep.interaction_moment));

  const std::vector<double> w0 = convolve_potential(K, f0);
  const std::vector<double> w1 = potential_mode1(K, f1);

  // int rho |q grad(rho^{q-1} g) + sigma grad W_g|^2 with the shared interface
  // stencil for radial derivatives and a cell sum for the tangential part.
  auto velocity_form = [&](double sigma) {
    double acc = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
      const double dc = gr.centers[k] - gr.centers[k - 1];
      const double rk = 0.5 * (rho[k] + rho[k - 1]);
      const double da = q * (av[k] - av[k - 1]) / dc + sigma * (w0[k] - w0[k - 1]) / dc;
      const double db = q * (bv[k] - bv[k - 1]) / dc + sigma * (w1[k] - w1[k - 1]) / dc;
      acc += rk * (da * da + db * db / nn) * gr.areas[k] * dc;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double tang = (q * bv[i] + sigma * w1[i]) / gr.centers[i];
      acc += (nn - 1.0) / nn * rho[i] * tang * tang * gr.volumes[i];
    }
    return acc;
  };

  rep.psi2 = velocity_form(0.0);

  auto rel = [](double value, double target) {
    return std::abs(value - target) / (1.0 + std::abs(target));
  };

  rep.q1 = q * rep.psi1 + rep.interaction_kernel;
  rep.q1_residual_q = rel(rep.q1, q * rep.psi1 - rep.psi3);
  rep.q1_residual_plain = rel(rep.q1, rep.psi1 - rep.psi3);

  // The l = 1 kernel potential of a quadratic interaction is an exactly linear
  // field, so its slope is recovered without stencil error; the l = 0 field of
  // a mean-zero source is constant and drops out of every gradient.
  const double tkern = -(w1[n - 1] - w1[0]) / (gr.centers[n - 1] - gr.centers[0]);
  rep.cross_kernel = -2.0 * tkern * tmom;
  rep.third_kernel = tkern * tkern * mass;
  rep.q2 = rep.psi2 + rep.cross_kernel + rep.third_kernel;
  rep.q2_residual_minus = rel(rep.q2, rep.psi2 - rep.psi3);
  rep.q2_residual_plus3 = rel(rep.q2, rep.psi2 + 3.0 * rep.psi3);

  rep.q2_direct = velocity_form(1.0);
  rep.q2_direct_residual = rel(rep.q2_direct, rep.psi2 - rep.psi3);
  rep.q2_direct_printed = velocity_form(-1.0);
  rep.q2_direct_printed_residual = rel(rep.q2_direct_printed, rep.psi2 + 3.0 * rep.psi3);
  return rep;
}

DiagnosticsRecord make_record(double t, const Profile& u, const ModelParams& p,
                              const StationaryState& ref, const KernelMatrix* K) {
  require_meanfield_kernel(p, K);
  DiagnosticsRecord rec;
  rec.t = t;
  rec.mass = total_mass(u);
  rec.second_moment = radial_moment(u, 2.0);
  if (p.variant == Variant::MeanField) {
    rec.free_energy = free_energy(u, p, *K);
    rec.fisher = fisher_information(u, p, *K);
  } else {
    rec.free_energy = free_energy(u, p);
    rec.fisher = fisher_information(u, p);
  }
  rec.rel_entropy = relative_entropy(u, ref, K);
  rec.weighted_l2 = weighted_l2(u, ref);
  return rec;
}

}  // namespace fdlab
