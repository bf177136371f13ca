#include "fdlab/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <vector>

#include "fdlab/errors.hpp"

namespace fdlab {
namespace {

constexpr double kDtFloor = 1e-15;

double phi_prime(double x, double q) { return q / (q - 1.0) * std::pow(x, q - 1.0); }

std::vector<double> drift_potential(const RadialGrid& g, double lambda) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::pow(g.centers[i], lambda) / lambda;
  return v;
}

// Interface data of the upwind flux: outward velocity v and donor density.
struct FaceData {
  std::vector<double> v;      // index k = 1..M-1
  std::vector<double> donor;
};

FaceData face_data(const RadialGrid& g, const std::vector<double>& u, double q,
                   const std::vector<double>& pot) {
  const std::size_t n = u.size();
  std::vector<double> xi(n);
  for (std::size_t i = 0; i < n; ++i) xi[i] = phi_prime(u[i], q) + pot[i];
  FaceData f;
  f.v.assign(n, 0.0);
  f.donor.assign(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double dc = g.centers[k] - g.centers[k - 1];
    f.v[k] = -(xi[k] - xi[k - 1]) / dc;
    f.donor[k] = f.v[k] > 0.0 ? u[k - 1] : u[k];
  }
  return f;
}

// One explicit step.  Returns false when positivity fails; the caller decides
// whether that is a rejection or an error.
bool attempt_step(const RadialGrid& g, const std::vector<double>& u, double q,
                  const std::vector<double>& pot, double dt, std::vector<double>& out) {
  const std::size_t n = u.size();
  const FaceData f = face_data(g, u, q, pot);
  std::vector<double> flux(n + 1, 0.0);
  for (std::size_t k = 1; k < n; ++k)
    flux[k] = f.donor[k] > 0.0 ? g.areas[k] * f.donor[k] * f.v[k] : 0.0;
  out.resize(n);
  bool positive = true;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = u[i] - dt / g.volumes[i] * (flux[i + 1] - flux[i]);
    if (!std::isfinite(out[i])) fail(ErrorCode::NonFiniteState, "step produced a non-finite cell");
    if (out[i] <= 0.0) positive = false;
  }
  return positive;
}

double monotone_dt(const RadialGrid& g, const std::vector<double>& u, double q,
                   const std::vector<double>& pot) {
  const std::size_t n = u.size();
  const FaceData f = face_data(g, u, q, pot);
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double phi2 = u[i] > 0.0 ? q * std::pow(u[i], q - 2.0) : 0.0;
    double s = 0.0;
    if (i + 1 < n) {
      const double dc = g.centers[i + 1] - g.centers[i];
      double face = std::max(f.v[i + 1], 0.0);
      if (f.donor[i + 1] > 0.0 && u[i] > 0.0) face += f.donor[i + 1] * phi2 / dc;
      s += g.areas[i + 1] * face;
    }
    if (i >= 1) {
      const double dc = g.centers[i] - g.centers[i - 1];
      double face = std::max(-f.v[i], 0.0);
      if (f.donor[i] > 0.0 && u[i] > 0.0) face += f.donor[i] * phi2 / dc;
      s += g.areas[i] * face;
    }
    if (s > 0.0) dt = std::min(dt, g.volumes[i] / s);
  }
  return dt;
}

std::vector<double> meanfield_potential(const KernelMatrix& K, const RadialGrid& g,
                                        const std::vector<double>& u) {
  std::vector<double> w(u.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j)
      acc += K.k_pot[i * K.n + j] * u[j] * g.volumes[j];
    w[i] = acc;
  }
  return w;
}

double energy_of(const RadialGrid& g, const std::vector<double>& u, const ModelParams& p,
                 const std::vector<double>& pot) {
  // Drift: sum [u^q/(q-1) + u V] V_i.  MeanField: the interaction enters with
  // weight 1/2, so the same sum with pot = W double counts it and the phi part
  // is corrected below.
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double cell = std::pow(u[i], p.q) / (p.q - 1.0);
    cell += p.variant == Variant::Drift ? u[i] * pot[i] : 0.5 * u[i] * pot[i];
    acc += cell * g.volumes[i];
  }
  return acc;
}

}  // namespace

Profile step(const Profile& u, const ModelParams& p, const KernelMatrix* K, double dt) {
  if (!(dt > 0.0)) fail(ErrorCode::BadParams, "step needs dt > 0");
  const RadialGrid& g = *u.grid;
  std::vector<double> pot;
  if (p.variant == Variant::MeanField) {
    if (K == nullptr) fail(ErrorCode::BadParams, "mean-field step needs an assembled kernel");
    pot = meanfield_potential(*K, g, u.density);
  } else {
    pot = drift_potential(g, p.lambda);
  }
  std::vector<double> next;
  if (!attempt_step(g, u.density, p.q, pot, dt, next))
    fail(ErrorCode::StepTooLarge, "step drove a cell to zero or below");
  return make_profile(u.grid, next);
}

double stable_dt(const Profile& u, const ModelParams& p, const KernelMatrix* K) {
  const RadialGrid& g = *u.grid;
  std::vector<double> pot;
  if (p.variant == Variant::MeanField) {
    if (K == nullptr) fail(ErrorCode::BadParams, "mean-field bound needs an assembled kernel");
    pot = meanfield_potential(*K, g, u.density);
  } else {
    pot = drift_potential(g, p.lambda);
  }
  return monotone_dt(g, u.density, p.q, pot);
}

double pair_stable_dt(const Profile& u, const Profile& w, const ModelParams& p) {
  if (p.variant != Variant::Drift)
    fail(ErrorCode::BadParams, "the pair bound is for the drift flow");
  require_same_grid(u, w);
  const RadialGrid& g = *u.grid;
  const std::size_t n = g.size();
  const std::vector<double> pot = drift_potential(g, p.lambda);
  std::vector<double> lo(n), hi(n), xi_lo(n), xi_hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = std::min(u.density[i], w.density[i]);
    hi[i] = std::max(u.density[i], w.density[i]);
    xi_lo[i] = phi_prime(lo[i], p.q) + pot[i];
    xi_hi[i] = phi_prime(hi[i], p.q) + pot[i];
  }
  // Face k: largest outward velocity over the order interval pairs the low
  // state outside with the high state inside; the inward bound mirrors it.
  std::vector<double> out_v(n, 0.0), in_v(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double dc = g.centers[k] - g.centers[k - 1];
    out_v[k] = std::max(0.0, -(xi_lo[k] - xi_hi[k - 1]) / dc);
    in_v[k] = std::max(0.0, (xi_hi[k] - xi_lo[k - 1]) / dc);
  }
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double phi2 = lo[i] > 0.0 ? p.q * std::pow(lo[i], p.q - 2.0) : 0.0;
    double s = 0.0;
    if (i + 1 < n) {
      const double dc = g.centers[i + 1] - g.centers[i];
      s += g.areas[i + 1] * (out_v[i + 1] + std::max(hi[i], hi[i + 1]) * phi2 / dc);
    }
    if (i >= 1) {
      const double dc = g.centers[i] - g.centers[i - 1];
      s += g.areas[i] * (in_v[i] + std::max(hi[i - 1], hi[i]) * phi2 / dc);
    }
    if (s > 0.0) dt = std::min(dt, g.volumes[i] / s);
  }
  return dt;
}

RunResult run(const Profile& u0, const ModelParams& p, const SolverConfig& cfg,
              const StationaryState& ref, const KernelMatrix* K) {
  if (!(cfg.t_end > 0.0)) fail(ErrorCode::BadParams, "run needs t_end > 0");
  if (!(cfg.cfl_safety > 0.0) || cfg.cfl_safety > 1.0)
    fail(ErrorCode::BadParams, "cfl_safety must lie in (0, 1]");
  if (!(cfg.snapshot_every > 0.0)) fail(ErrorCode::BadParams, "snapshot_every must be positive");
  if (!cfg.adapt && !(cfg.dt_init > 0.0))
    fail(ErrorCode::BadParams, "fixed-step mode needs dt_init > 0");
  if (p.variant == Variant::MeanField && K == nullptr)
    fail(ErrorCode::BadParams, "mean-field run needs an assembled kernel");
  require_same_grid(u0, ref.profile);

  const RadialGrid& g = *u0.grid;
  const std::size_t n = g.size();
  RunResult res{u0, {}, 0, 0, {}, false};

  std::vector<double> u = u0.density;
  const std::vector<double> vpot = drift_potential(g, p.lambda);
  std::vector<double> pot =
      p.variant == Variant::MeanField ? meanfield_potential(*K, g, u) : vpot;

  double trap = std::numeric_limits<double>::infinity();
  std::size_t empty = 0;
  double ratio_lo = std::numeric_limits<double>::infinity(), ratio_hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] > 0.0) {
      trap = std::min(trap, p.q / (1.0 - p.q) * std::pow(u[i], p.q - 1.0) - pot[i]);
      const double ratio = u[i] / ref.profile.density[i];
      ratio_lo = std::min(ratio_lo, ratio);
      ratio_hi = std::max(ratio_hi, ratio);
    } else {
      ++empty;
    }
  }
  if (!(trap > 0.0)) {
    std::ostringstream msg;
    msg << "initial trap condition fails: min q/(1-q) u^(q-1) - V = " << trap;
    res.warnings.push_back(msg.str());
  }
  if (empty > 0) {
    std::ostringstream msg;
    msg << "initial datum has " << empty << " empty cells";
    res.warnings.push_back(msg.str());
  } else if (ratio_lo < 1e-2 || ratio_hi > 1e2) {
    std::ostringstream msg;
    msg << "initial datum / reference ratio spans [" << ratio_lo << ", " << ratio_hi << "]";
    res.warnings.push_back(msg.str());
  }

  auto record = [&](double t, const std::vector<double>& state) {
    res.series.push_back(make_record(t, make_profile(u0.grid, state), p, ref, K));
  };
  record(0.0, u);

  double energy = energy_of(g, u, p, pot);
  double t = 0.0;
  double dt_cur = cfg.dt_init > 0.0 ? cfg.dt_init
                                    : cfg.cfl_safety * monotone_dt(g, u, p.q, pot);
  double next_rec = cfg.snapshot_every;
  std::size_t consecutive = 0;
  const double t_tol = 1e-9 * cfg.snapshot_every;
  std::vector<double> trial, trial_pot;

  while (t < cfg.t_end - t_tol) {
    double dt_eff = dt_cur;
    if (cfg.adapt) {
      dt_cur = std::min(dt_cur, cfg.cfl_safety * monotone_dt(g, u, p.q, pot));
      dt_eff = std::min({dt_cur, cfg.t_end - t, next_rec - t});
    }
    const bool positive = attempt_step(g, u, p.q, pot, dt_eff, trial);
    bool accept = positive;
    double trial_energy = 0.0;
    if (positive) {
      trial_pot = p.variant == Variant::MeanField ? meanfield_potential(*K, g, trial) : vpot;
      trial_energy = energy_of(g, trial, p, trial_pot);
      if (cfg.entropy_guard && trial_energy > energy + 1e-12 * std::abs(energy))
        accept = false;
    }
    if (!accept) {
      if (!cfg.adapt) {
        std::ostringstream msg;
        msg << (positive ? "free energy increased" : "positivity lost")
            << " at fixed dt = " << dt_eff << ", t = " << t;
        fail(ErrorCode::StepTooLarge, msg.str());
      }
      ++res.rejected_steps;
      consecutive = 0;
      dt_cur *= 0.5;
      if (dt_cur < kDtFloor) fail(ErrorCode::StepTooLarge, "time step underflowed 1e-15");
      continue;
    }
    u.swap(trial);
    pot.swap(trial_pot);
    energy = trial_energy;
    t += dt_eff;
    ++res.accepted_steps;
    if (cfg.adapt && ++consecutive >= 50) {
      dt_cur *= 1.2;
      consecutive = 0;
    }
    while (next_rec < cfg.t_end - t_tol && t >= next_rec - t_tol) {
      record(t, u);
      next_rec += cfg.snapshot_every;
    }
  }
  record(t, u);

  res.energy_monotone = true;
  for (std::size_t k = 1; k < res.series.size(); ++k) {
    const double prev = res.series[k - 1].free_energy;
    if (res.series[k].free_energy > prev + 1e-12 * std::abs(prev)) res.energy_monotone = false;
  }
  res.final = make_profile(u0.grid, u);
  return res;
}

PairRunResult run_pair(const Profile& a0, const Profile& b0, const ModelParams& p,
                       const SolverConfig& cfg) {
  if (p.variant != Variant::Drift)
    fail(ErrorCode::BadParams, "the pair run is for the drift flow");
  require_same_grid(a0, b0);
  if (!(cfg.t_end > 0.0)) fail(ErrorCode::BadParams, "run needs t_end > 0");
  if (!(cfg.cfl_safety > 0.0) || cfg.cfl_safety > 1.0)
    fail(ErrorCode::BadParams, "cfl_safety must lie in (0, 1]");
  if (!(cfg.snapshot_every > 0.0)) fail(ErrorCode::BadParams, "snapshot_every must be positive");

  const RadialGrid& g = *a0.grid;
  const std::vector<double> pot = drift_potential(g, p.lambda);
  std::vector<double> a = a0.density, b = b0.density, ta, tb;

  PairRunResult res{a0, b0, {}, {}, std::numeric_limits<double>::infinity(), 0};
  auto l1_now = [&]() {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      acc += std::abs(a[i] - b[i]) * g.volumes[i];
    return acc;
  };
  res.times.push_back(0.0);
  res.l1.push_back(l1_now());

  double t = 0.0;
  double next_rec = cfg.snapshot_every;
  const double t_tol = 1e-9 * cfg.snapshot_every;
  while (t < cfg.t_end - t_tol) {
    const Profile pa = make_profile(a0.grid, a), pb = make_profile(a0.grid, b);
    double dt_eff = std::min({cfg.cfl_safety * pair_stable_dt(pa, pb, p),
                              cfg.t_end - t, next_rec - t});
    for (;;) {
      const bool ok = attempt_step(g, a, p.q, pot, dt_eff, ta) &&
                      attempt_step(g, b, p.q, pot, dt_eff, tb);
      if (ok) break;
      dt_eff *= 0.5;
      if (dt_eff < kDtFloor) fail(ErrorCode::StepTooLarge, "time step underflowed 1e-15");
    }
    a.swap(ta);
    b.swap(tb);
    t += dt_eff;
    ++res.steps;
    for (std::size_t i = 0; i < g.size(); ++i)
      res.min_order_gap = std::min(res.min_order_gap, b[i] - a[i]);
    if (t >= next_rec - t_tol || t >= cfg.t_end - t_tol) {
      res.times.push_back(t);
      res.l1.push_back(l1_now());
      while (next_rec <= t + t_tol) next_rec += cfg.snapshot_every;
    }
  }
  res.final_a = make_profile(a0.grid, a);
  res.final_b = make_profile(a0.grid, b);
  return res;
}

DissipationReport dissipation_check(const std::vector<DiagnosticsRecord>& series) {
  if (series.size() < 2) fail(ErrorCode::TooFewSamples, "dissipation check needs two records");
  DissipationReport rep;
  for (std::size_t k = 1; k < series.size(); ++k) {
    const double dt = series[k].t - series[k - 1].t;
    if (!(dt > 0.0)) fail(ErrorCode::BadParams, "records must have increasing times");
    const double slope = (series[k].free_energy - series[k - 1].free_energy) / dt;
    const double mid = 0.5 * (series[k].fisher + series[k - 1].fisher);
    const double defect = std::abs(slope + mid);
    rep.max_defect = std::max(rep.max_defect, defect);
    rep.max_defect_rel = std::max(rep.max_defect_rel, defect / (1.0 + mid));
  }
  return rep;
}

}  // namespace fdlab
