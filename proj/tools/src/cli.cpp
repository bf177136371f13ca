#include "fdlab_cli/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "fdlab/diagnostics.hpp"
#include "fdlab/errors.hpp"
#include "fdlab/evolve.hpp"
#include "fdlab/grid.hpp"
#include "fdlab/inequalities.hpp"
#include "fdlab/io.hpp"
#include "fdlab/kernels.hpp"
#include "fdlab/params.hpp"
#include "fdlab/profile.hpp"
#include "fdlab/rates.hpp"
#include "fdlab/rng.hpp"
#include "fdlab/stationary.hpp"

namespace fdlab::cli {
namespace {

constexpr double kPi = 3.14159265358979323846;

using Meta = std::vector<std::pair<std::string, std::string>>;

struct ModelOpts {
  std::string variant = "drift";
  int dim = 1;
  double lambda = 2.0;
  double q = 0.5;
  double mass = 1.0;
};

struct ModelOptionHandles {
  CLI::Option* variant = nullptr;
  CLI::Option* dim = nullptr;
  CLI::Option* lambda = nullptr;
  CLI::Option* q = nullptr;
  CLI::Option* mass = nullptr;
};

struct GridOpts {
  double radius = 0.0;
  std::size_t cells = 512;
  std::size_t quad_order = 64;
};

struct OutOpts {
  std::string dir = ".";
  bool check = false;
};

struct EvolveOpts {
  double t_end = 1.0;
  double snapshot_every = 0.1;
  double dt = 0.0;
  double cfl = 0.9;
  bool fixed_dt = false;
  bool no_entropy_guard = false;
  std::string init;
  std::string initial;
  std::string compare;
};

struct HpOpts {
  double tol = 1e-10;
  int max_iter = 500;
};

struct SampleOpts {
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  double eps = 1e-2;
};

struct PositivityOpts {
  int dim = 2;
  double lambda = 2.0;
  double radius = 3.0;
  std::size_t cells = 160;
  std::size_t quad_order = 128;
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  int descent = 0;
};

struct RatesOpts {
  std::string input;
  std::string column = "weighted_l2";
  std::string kind = "auto";
  double window_start = -1.0;
  double window_end = 0.0;
  double floor = 0.0;
};

ModelOptionHandles add_model_options(CLI::App* sub, ModelOpts& m, bool with_variant = true) {
  ModelOptionHandles h;
  if (with_variant) {
    h.variant = sub->add_option("--variant", m.variant, "equation variant")
                    ->check(CLI::IsMember({"drift", "meanfield"}))
                    ->capture_default_str();
  }
  h.dim = sub->add_option("--dim", m.dim, "space dimension N >= 1")->capture_default_str();
  h.lambda = sub->add_option("--lambda", m.lambda, "potential exponent")->capture_default_str();
  h.q = sub->add_option("--q", m.q, "diffusion exponent in (0,1)")->capture_default_str();
  h.mass = sub->add_option("--mass", m.mass, "total mass; the mean-field variant pins 1")
              ->capture_default_str();
  return h;
}

void add_grid_options(CLI::App* sub, GridOpts& g) {
  sub->add_option("--radius", g.radius, "truncation radius, 0 selects one from the tail bound")
      ->capture_default_str();
  sub->add_option("--cells", g.cells, "radial cell count")->capture_default_str();
  sub->add_option("--quad-order", g.quad_order, "angular quadrature order for kernel assembly")
      ->capture_default_str();
}

void add_fp_options(CLI::App* sub, FixedPointOptions& fp) {
  sub->add_option("--damping", fp.damping, "fixed-point damping in (0,1]")->capture_default_str();
  sub->add_option("--fp-tol", fp.tol, "fixed-point sup-norm tolerance")->capture_default_str();
  sub->add_option("--fp-max-iter", fp.max_iter, "fixed-point iteration cap")->capture_default_str();
}

void add_out_options(CLI::App* sub, OutOpts& o) {
  sub->add_option("--out", o.dir, "output directory")->capture_default_str();
  sub->add_flag("--check", o.check, "verify this command's manifest checksums and exit");
  sub->set_config("--config", "", "key=value defaults; command-line flags override");
}

double to_double(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    fail(ErrorCode::BadParams, what + " is not a number: '" + text + "'");
  }
  return value;
}

ModelParams to_params(const ModelOpts& m) {
  ModelParams p;
  p.dim = m.dim;
  p.lambda = m.lambda;
  p.q = m.q;
  p.mass = m.mass;
  if (m.variant == "drift") {
    p.variant = Variant::Drift;
  } else if (m.variant == "meanfield") {
    p.variant = Variant::MeanField;
  } else {
    fail(ErrorCode::BadParams, "variant must be drift or meanfield, got '" + m.variant + "'");
  }
  return validate_params(p);
}

std::shared_ptr<const RadialGrid> make_grid_for(const ModelParams& p, const GridOpts& g) {
  // The automatic radius trades a ~1e-6 tail mass for head resolution; tighter
  // truncation wants an explicit --radius together with more cells.
  const double radius = g.radius > 0.0 ? g.radius : suggest_truncation_radius(p, 1e-6);
  return std::make_shared<RadialGrid>(build_grid(p.dim, radius, g.cells));
}

struct Reference {
  StationaryState state;
  std::optional<KernelMatrix> kernel;

  const KernelMatrix* kernel_ptr() const { return kernel ? &*kernel : nullptr; }
};

Reference make_reference(const ModelParams& p, std::shared_ptr<const RadialGrid> grid,
                         std::size_t quad_order, const FixedPointOptions& fp) {
  Reference ref;
  if (p.variant == Variant::Drift) {
    ref.state = solve_h_star(p, grid);
    return ref;
  }
  ref.kernel = assemble_kernel(grid, p.lambda, quad_order);
  ref.state = p.lambda == 2.0 ? meanfield_lambda2(p, grid)
                              : meanfield_fixed_point(p, *ref.kernel, fp);
  return ref;
}

std::string iso_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

Meta model_meta(const std::string& cmd, const ModelParams& p, const RadialGrid& g,
                std::size_t quad_order) {
  Meta m;
  m.emplace_back("command", cmd);
  m.emplace_back("variant", variant_name(p.variant));
  m.emplace_back("dim", std::to_string(p.dim));
  m.emplace_back("lambda", g17(p.lambda));
  m.emplace_back("q", g17(p.q));
  m.emplace_back("mass", g17(p.mass));
  m.emplace_back("radius", g17(g.radius));
  m.emplace_back("cells", std::to_string(g.size()));
  m.emplace_back("quad_order", std::to_string(quad_order));
  return m;
}

void ensure_outdir(const OutOpts& o) {
  std::error_code ec;
  std::filesystem::create_directories(o.dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create output directory " + o.dir);
}

int check_and_report(const OutOpts& o, const std::string& cmd, std::ostream& out,
                     std::ostream& err) {
  const std::string path = o.dir + "/" + cmd + "_manifest.txt";
  const ManifestCheck rep = check_manifest(path);
  if (rep.ok) {
    out << "manifest ok: " << path << "\n";
    return 0;
  }
  for (const auto& problem : rep.problems) err << "manifest problem: " << problem << "\n";
  return 3;
}

void write_run_manifest(const OutOpts& o, const std::string& cmd, Meta meta,
                        const std::vector<std::string>& artifacts) {
  meta.emplace_back("wall_clock_utc", iso_utc_now());
  write_manifest(o.dir + "/" + cmd + "_manifest.txt", meta, artifacts);
}

void say(std::ostream& out, const std::string& key, double value) {
  out << key << '=' << g17(value) << '\n';
}

// ---------------------------------------------------------------------------
// stationary

int cmd_stationary(const ModelOpts& mo, const GridOpts& go, const FixedPointOptions& fp,
                   const OutOpts& oo, std::ostream& out, std::ostream& err) {
  if (oo.check) return check_and_report(oo, "stationary", out, err);
  ensure_outdir(oo);
  const ModelParams p = to_params(mo);
  auto grid = make_grid_for(p, go);
  const Reference ref = make_reference(p, grid, go.quad_order, fp);
  const StationaryState& s = ref.state;

  say(out, "h_or_c", s.h_or_c);
  say(out, "c_equation", s.c_equation);
  say(out, "residual", s.residual);
  say(out, "mass", total_mass(s.profile));

  Meta extra;
  extra.emplace_back("h_or_c", g17(s.h_or_c));
  extra.emplace_back("c_equation", g17(s.c_equation));
  extra.emplace_back("residual", g17(s.residual));
  write_snapshot(oo.dir + "/stationary_snapshot.csv", s.profile, p, extra);
  std::vector<std::string> artifacts{"stationary_snapshot.csv"};

  Meta meta = model_meta("stationary", p, *grid, go.quad_order);
  meta.insert(meta.end(), extra.begin(), extra.end());

  if (p.variant == Variant::MeanField) {
    const VirialReport v = virial_residual(s, *ref.kernel);
    write_csv(oo.dir + "/stationary_virial.csv",
              {"lhs1", "rhs1", "gap1", "lhs2", "rhs2", "gap2", "combined_lhs", "combined_rhs",
               "combined_gap", "combined_defined"},
              {{v.lhs1, v.rhs1, v.gap1, v.lhs2, v.rhs2, v.gap2, v.combined_lhs, v.combined_rhs,
                v.combined_gap, v.combined_defined ? 1.0 : 0.0}});
    artifacts.push_back("stationary_virial.csv");
    say(out, "virial_gap1", v.gap1);
    say(out, "virial_gap2", v.gap2);
    if (v.combined_defined) say(out, "virial_combined_gap", v.combined_gap);
  }
  write_run_manifest(oo, "stationary", std::move(meta), artifacts);
  return 0;
}

// ---------------------------------------------------------------------------
// evolve

void require_compatible(const ModelOptionHandles& h, const ModelOpts& mo, const ModelParams& sp,
                        const std::string& file) {
  const auto differ = [](double a, double b) {
    return std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  if (h.variant && h.variant->count() > 0 && mo.variant != variant_name(sp.variant)) {
    fail(ErrorCode::BadParams, "--variant disagrees with " + file);
  }
  if (h.dim->count() > 0 && mo.dim != sp.dim) {
    fail(ErrorCode::BadParams, "--dim disagrees with " + file);
  }
  if (h.lambda->count() > 0 && differ(mo.lambda, sp.lambda)) {
    fail(ErrorCode::BadParams, "--lambda disagrees with " + file);
  }
  if (h.q->count() > 0 && differ(mo.q, sp.q)) {
    fail(ErrorCode::BadParams, "--q disagrees with " + file);
  }
}

Profile builtin_initial(const std::string& spec, const ModelParams& p, const Reference& ref) {
  std::string name = spec;
  double value = 0.0;
  bool has_value = false;
  if (const auto colon = spec.find(':'); colon != std::string::npos) {
    name = spec.substr(0, colon);
    value = to_double(spec.substr(colon + 1), "initial generator value");
    has_value = true;
  }
  if (name.empty()) {
    name = p.variant == Variant::Drift ? "barenblatt" : "perturb";
  }
  const auto grid = ref.state.profile.grid;
  if (name == "barenblatt") {
    if (p.variant != Variant::Drift) {
      fail(ErrorCode::BadParams, "the barenblatt generator applies to the drift variant");
    }
    const double factor = has_value ? value : 0.8;
    if (!(factor > 0.0)) fail(ErrorCode::BadParams, "barenblatt h-factor must be positive");
    return scaled_to_mass(barenblatt_profile(p, factor * ref.state.h_or_c, grid), p.mass);
  }
  if (name == "perturb") {
    const double eps = has_value ? value : 0.1;
    if (!(eps > -1.0 && eps < 1.0)) {
      fail(ErrorCode::BadParams, "perturb amplitude must lie in (-1, 1)");
    }
    const RadialGrid& g = *grid;
    std::vector<double> d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double bump = std::cos(kPi * g.centers[i] / g.radius);
      d[i] = ref.state.profile.density[i] * (1.0 + eps * bump);
    }
    return scaled_to_mass(make_profile(grid, std::move(d)), p.mass);
  }
  fail(ErrorCode::BadParams, "unknown initial generator '" + name +
                                 "'; use barenblatt:<h-factor> or perturb:<amplitude>");
}

SolverConfig make_cfg(const EvolveOpts& eo) {
  SolverConfig cfg;
  cfg.dt_init = eo.dt;
  cfg.cfl_safety = eo.cfl;
  cfg.t_end = eo.t_end;
  cfg.snapshot_every = eo.snapshot_every;
  cfg.entropy_guard = !eo.no_entropy_guard;
  cfg.adapt = !eo.fixed_dt;
  return cfg;
}

int cmd_evolve(const ModelOpts& mo, const ModelOptionHandles& mh, const GridOpts& go,
               const FixedPointOptions& fp, const EvolveOpts& eo, const OutOpts& oo,
               std::ostream& out, std::ostream& err) {
  if (oo.check) return check_and_report(oo, "evolve", out, err);
  ensure_outdir(oo);

  ModelParams p;
  Profile u0;
  std::shared_ptr<const RadialGrid> grid;
  if (!eo.initial.empty()) {
    SnapshotData snap = read_snapshot(eo.initial);
    require_compatible(mh, mo, snap.params, eo.initial);
    p = snap.params;
    u0 = std::move(snap.profile);
    grid = u0.grid;
    if (p.variant == Variant::Drift) {
      p.mass = total_mass(u0);
      p = validate_params(p);
    } else if (std::abs(total_mass(u0) - 1.0) > 1e-8) {
      fail(ErrorCode::MassMismatch,
           "mean-field initial data must carry unit mass, got " + g17(total_mass(u0)));
    }
  } else {
    p = to_params(mo);
    grid = make_grid_for(p, go);
  }

  const Reference ref = make_reference(p, grid, go.quad_order, fp);
  if (eo.initial.empty()) u0 = builtin_initial(eo.init, p, ref);

  const SolverConfig cfg = make_cfg(eo);
  Meta meta = model_meta("evolve", p, *grid, go.quad_order);
  meta.emplace_back("t_end", g17(cfg.t_end));
  meta.emplace_back("snapshot_every", g17(cfg.snapshot_every));
  meta.emplace_back("dt_init", g17(cfg.dt_init));
  meta.emplace_back("cfl_safety", g17(cfg.cfl_safety));
  meta.emplace_back("entropy_guard", cfg.entropy_guard ? "1" : "0");
  meta.emplace_back("adapt", cfg.adapt ? "1" : "0");
  if (!eo.initial.empty()) meta.emplace_back("initial", eo.initial);

  if (!eo.compare.empty()) {
    if (p.variant != Variant::Drift) {
      fail(ErrorCode::BadParams, "comparison runs cover the drift variant");
    }
    SnapshotData snapb = read_snapshot(eo.compare);
    require_compatible(mh, mo, snapb.params, eo.compare);
    require_same_grid(u0, snapb.profile);
    const PairRunResult pr = run_pair(u0, snapb.profile, p, cfg);

    std::vector<std::vector<double>> rows;
    rows.reserve(pr.times.size());
    for (std::size_t i = 0; i < pr.times.size(); ++i) rows.push_back({pr.times[i], pr.l1[i]});
    write_csv(oo.dir + "/evolve_pair.csv", {"t", "l1_distance"}, rows);
    write_snapshot(oo.dir + "/evolve_final.csv", pr.final_a, p, {{"t", g17(cfg.t_end)}});

    say(out, "steps", static_cast<double>(pr.steps));
    say(out, "min_order_gap", pr.min_order_gap);
    say(out, "l1_initial", pr.l1.front());
    say(out, "l1_final", pr.l1.back());

    meta.emplace_back("compare", eo.compare);
    meta.emplace_back("steps", std::to_string(pr.steps));
    meta.emplace_back("min_order_gap", g17(pr.min_order_gap));
    write_run_manifest(oo, "evolve", std::move(meta),
                       {"evolve_pair.csv", "evolve_final.csv"});
    return 0;
  }

  const RunResult rr = run(u0, p, cfg, ref.state, ref.kernel_ptr());
  for (const auto& w : rr.warnings) err << "warning: " << w << "\n";

  std::vector<std::vector<double>> rows;
  rows.reserve(rr.series.size());
  for (const auto& rec : rr.series) {
    rows.push_back({rec.t, rec.mass, rec.free_energy, rec.fisher, rec.rel_entropy,
                    rec.weighted_l2, rec.second_moment});
  }
  write_csv(oo.dir + "/evolve_series.csv",
            {"t", "mass", "free_energy", "fisher", "rel_entropy", "weighted_l2", "second_moment"},
            rows);
  write_snapshot(oo.dir + "/evolve_final.csv", rr.final, p,
                 {{"t", g17(rr.series.back().t)},
                  {"h_or_c", g17(ref.state.h_or_c)}});

  const double mass_drift =
      std::abs(rr.series.back().mass - rr.series.front().mass) / rr.series.front().mass;
  say(out, "accepted_steps", static_cast<double>(rr.accepted_steps));
  say(out, "rejected_steps", static_cast<double>(rr.rejected_steps));
  out << "energy_monotone=" << (rr.energy_monotone ? 1 : 0) << "\n";
  say(out, "mass_drift_rel", mass_drift);
  if (rr.series.size() >= 2) {
    say(out, "dissipation_defect_rel", dissipation_check(rr.series).max_defect_rel);
  }

  meta.emplace_back("accepted_steps", std::to_string(rr.accepted_steps));
  meta.emplace_back("rejected_steps", std::to_string(rr.rejected_steps));
  meta.emplace_back("energy_monotone", rr.energy_monotone ? "1" : "0");
  meta.emplace_back("mass_drift_rel", g17(mass_drift));
  write_run_manifest(oo, "evolve", std::move(meta), {"evolve_series.csv", "evolve_final.csv"});
  return 0;
}

// ---------------------------------------------------------------------------
// hp

int cmd_hp(const ModelOpts& mo, const GridOpts& go, const FixedPointOptions& fp, const HpOpts& ho,
           const OutOpts& oo, std::ostream& out, std::ostream& err) {
  if (oo.check) return check_and_report(oo, "hp", out, err);
  ensure_outdir(oo);
  const ModelParams p = to_params(mo);
  GridOpts hp_go = go;
  if (hp_go.radius <= 0.0) hp_go.radius = suggest_truncation_radius(p);
  auto grid = make_grid_for(p, hp_go);
  const Reference ref = make_reference(p, grid, go.quad_order, fp);

  const EigenEstimate est = hp_estimate(ref.state, 0, ho.tol, ho.max_iter);
  const MuckenhouptPair pair = hp_weight_pair(ref.state);
  const double b = muckenhoupt_B(pair.mu, pair.nu, *grid);
  const double pinned = pinned_hardy_constant(pair.mu, pair.nu, *grid, ho.tol, ho.max_iter);

  double a_formula = std::numeric_limits<double>::quiet_NaN();
  if (p.lambda == 2.0) {
    try {
      a_formula = hp_constant_formula(p.dim, p.q);
    } catch (const Error&) {
      // q outside the closed-form range; the estimate stands on its own.
    }
  }

  say(out, "sigma", est.sigma);
  say(out, "constant", est.constant);
  say(out, "a_constant", est.a_constant);
  if (std::isfinite(a_formula)) say(out, "a_formula", a_formula);
  say(out, "muckenhoupt_b", b);
  say(out, "pinned_constant", pinned);
  const bool bracket_ok = b <= pinned && pinned <= 4.0 * b;
  out << "bracket_ok=" << (bracket_ok ? 1 : 0) << "\n";
  say(out, "iterations", static_cast<double>(est.iterations));

  write_csv(oo.dir + "/hp_result.csv",
            {"dim", "lambda", "q", "cells", "radius", "sigma", "constant", "a_constant",
             "a_formula", "muckenhoupt_b", "pinned_constant", "bracket_ok", "iterations",
             "converged"},
            {{static_cast<double>(p.dim), p.lambda, p.q, static_cast<double>(grid->size()),
              grid->radius, est.sigma, est.constant, est.a_constant, a_formula, b, pinned,
              bracket_ok ? 1.0 : 0.0, static_cast<double>(est.iterations),
              est.converged ? 1.0 : 0.0}});

  Meta meta = model_meta("hp", p, *grid, go.quad_order);
  meta.emplace_back("sigma", g17(est.sigma));
  meta.emplace_back("constant", g17(est.constant));
  meta.emplace_back("a_constant", g17(est.a_constant));
  meta.emplace_back("muckenhoupt_b", g17(b));
  meta.emplace_back("pinned_constant", g17(pinned));
  write_run_manifest(oo, "hp", std::move(meta), {"hp_result.csv"});
  return 0;
}

// ---------------------------------------------------------------------------
// rhls

// Multiplicative bump sampled from low cosine modes, then projected so that
// rho(1+eps b) preserves mass, second moment, and the q-entropy to first
// order and carries no dilation component. The quotient is flat along mass
// scaling and dilation and its discrete gradient at the computed state lies
// in the span of those moment directions, so without the projection a trial
// measures quadrature defect instead of curvature.
std::vector<double> random_bump(Rng& rng, const RadialGrid& g, const std::vector<double>& rho,
                                double q) {
  const std::size_t n = g.size();
  std::array<double, 3> a{};
  for (auto& coeff : a) coeff = 2.0 * rng.uniform() - 1.0;
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g.centers[i] / g.radius;
    b[i] = a[0] * std::cos(kPi * x) + a[1] * std::cos(2.0 * kPi * x) +
           a[2] * std::cos(3.0 * kPi * x);
  }

  std::vector<std::vector<double>> dirs(4, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? i : i + 1;
    const double dlr =
        (std::log(rho[hi]) - std::log(rho[lo])) / (g.centers[hi] - g.centers[lo]);
    dirs[0][i] = 1.0;
    dirs[1][i] = g.centers[i] * g.centers[i];
    dirs[2][i] = std::pow(rho[i], q - 1.0);
    dirs[3][i] = static_cast<double>(g.dim) + g.centers[i] * dlr;
  }

  const auto dot = [&](const std::vector<double>& f, const std::vector<double>& h) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += f[i] * h[i] * rho[i] * g.volumes[i];
    return s;
  };

  // Modified Gram-Schmidt in the rho-weighted inner product; directions that
  // collapse onto earlier ones (the dilation mode is a moment combination at
  // lambda = 2) are dropped rather than divided by a tiny norm.
  std::vector<std::vector<double>> basis;
  for (auto& d : dirs) {
    const double before = dot(d, d);
    for (const auto& e : basis) {
      const double c = dot(d, e);
      for (std::size_t i = 0; i < n; ++i) d[i] -= c * e[i];
    }
    const double after = dot(d, d);
    if (!(after > 1e-16 * before)) continue;
    const double inv = 1.0 / std::sqrt(after);
    for (auto& v : d) v *= inv;
    basis.push_back(std::move(d));
  }
  for (const auto& e : basis) {
    const double c = dot(b, e);
    for (std::size_t i = 0; i < n; ++i) b[i] -= c * e[i];
  }

  double sup = 0.0;
  for (double v : b) sup = std::max(sup, std::abs(v));
  if (sup > 0.0) {
    for (auto& v : b) v /= sup;
  }
  return b;
}

int cmd_rhls(const ModelOpts& mo, const GridOpts& go, const FixedPointOptions& fp,
             const SampleOpts& so, const OutOpts& oo, std::ostream& out, std::ostream& err) {
  if (oo.check) return check_and_report(oo, "rhls", out, err);
  ensure_outdir(oo);
  ModelOpts forced = mo;
  forced.variant = "meanfield";
  forced.mass = 1.0;
  const ModelParams p = to_params(forced);
  auto grid = make_grid_for(p, go);
  const Reference ref = make_reference(p, grid, go.quad_order, fp);

  const double j_base = rhls_quotient(ref.state.profile, p, *ref.kernel);
  const double tol = 1e-12 * (1.0 + std::abs(j_base));

  Rng rng(so.seed);
  std::vector<std::vector<double>> rows;
  rows.reserve(so.trials);
  std::size_t violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t trial = 0; trial < so.trials; ++trial) {
    const auto bump = random_bump(rng, *grid, ref.state.profile.density, p.q);
    std::vector<double> d(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
      d[i] = std::max(0.0, ref.state.profile.density[i] * (1.0 + so.eps * bump[i]));
    }
    const Profile pert = make_profile(grid, std::move(d));
    const double j = rhls_quotient(pert, p, *ref.kernel);
    const double margin = j - j_base;
    if (margin < -tol) ++violations;
    min_margin = std::min(min_margin, margin);
    rows.push_back({static_cast<double>(trial), j, margin});
  }
  write_csv(oo.dir + "/rhls_result.csv", {"trial", "j_value", "margin"}, rows);

  say(out, "j_base", j_base);
  say(out, "trials", static_cast<double>(so.trials));
  say(out, "violations", static_cast<double>(violations));
  say(out, "min_margin", min_margin);

  Meta meta = model_meta("rhls", p, *grid, go.quad_order);
  meta.emplace_back("seed", std::to_string(so.seed));
  meta.emplace_back("trials", std::to_string(so.trials));
  meta.emplace_back("eps", g17(so.eps));
  meta.emplace_back("j_base", g17(j_base));
  meta.emplace_back("violations", std::to_string(violations));
  meta.emplace_back("min_margin", g17(min_margin));
  write_run_manifest(oo, "rhls", std::move(meta), {"rhls_result.csv"});
  return 0;
}

// ---------------------------------------------------------------------------
// positivity

void project_pair(const RadialGrid& g, std::vector<double>& f0, std::vector<double>& f1) {
  double s0 = 0.0, vol = 0.0, s1 = 0.0, r2 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    s0 += f0[i] * g.volumes[i];
    vol += g.volumes[i];
    s1 += g.centers[i] * f1[i] * g.volumes[i];
    r2 += g.centers[i] * g.centers[i] * g.volumes[i];
  }
  const double c0 = s0 / vol;
  const double c1 = s1 / r2;
  for (std::size_t i = 0; i < g.size(); ++i) {
    f0[i] -= c0;
    f1[i] -= c1 * g.centers[i];
  }
}

void random_pair(Rng& rng, const RadialGrid& g, std::vector<double>& f0, std::vector<double>& f1) {
  std::array<double, 4> a{};
  std::array<double, 3> c{};
  for (auto& coeff : a) coeff = rng.normal();
  for (auto& coeff : c) coeff = rng.normal();
  f0.assign(g.size(), 0.0);
  f1.assign(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.centers[i] / g.radius;
    for (std::size_t k = 0; k < a.size(); ++k) f0[i] += a[k] * std::cos(kPi * x * static_cast<double>(k));
    for (std::size_t k = 0; k < c.size(); ++k) f1[i] += c[k] * std::sin(kPi * x * static_cast<double>(k + 1));
  }
  project_pair(g, f0, f1);
  // Unit weighted l2 size keeps the form value scale free, so the fixed
  // negativity floor compares like with like across grids and seeds.
  double n2 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    n2 += (f0[i] * f0[i] + f1[i] * f1[i]) * g.volumes[i];
  }
  if (n2 > 0.0) {
    const double inv = 1.0 / std::sqrt(n2);
    for (std::size_t i = 0; i < g.size(); ++i) {
      f0[i] *= inv;
      f1[i] *= inv;
    }
  }
}

double coordinate_descent(const KernelMatrix& K, const RadialGrid& g, std::vector<double> f0,
                          std::vector<double> f1, int sweeps, double start_value) {
  double best = start_value;
  double scale = 0.0;
  for (const double v : f0) scale = std::max(scale, std::abs(v));
  for (const double v : f1) scale = std::max(scale, std::abs(v));
  double step = scale > 0.0 ? 0.25 * scale : 0.25;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    bool improved = false;
    for (int which = 0; which < 2; ++which) {
      auto& target = which == 0 ? f0 : f1;
      for (std::size_t i = 0; i < target.size(); ++i) {
        for (const double sgn : {1.0, -1.0}) {
          std::vector<double> c0 = f0, c1 = f1;
          (which == 0 ? c0 : c1)[i] += sgn * step;
          project_pair(g, c0, c1);
          const double v = interaction_positivity(K, c0, c1);
          if (v < best - 1e-15 * (1.0 + std::abs(best))) {
            f0 = std::move(c0);
            f1 = std::move(c1);
            best = v;
            improved = true;
            break;
          }
        }
      }
    }
    if (!improved) {
      step *= 0.5;
      if (step < 1e-8) break;
    }
  }
  return best;
}

int cmd_positivity(const PositivityOpts& po, const OutOpts& oo, std::ostream& out,
                   std::ostream& err) {
  if (oo.check) return check_and_report(oo, "positivity", out, err);
  ensure_outdir(oo);
  if (!(po.lambda > 0.0)) fail(ErrorCode::LambdaOutOfRange, "lambda must be positive");
  auto grid = std::make_shared<RadialGrid>(build_grid(po.dim, po.radius, po.cells));
  const KernelMatrix K = assemble_kernel(grid, po.lambda, po.quad_order);

  Rng rng(po.seed);
  std::vector<std::vector<double>> rows;
  rows.reserve(po.trials);
  double min_value = std::numeric_limits<double>::infinity();
  std::size_t argmin = 0;
  std::vector<double> worst_f0, worst_f1, f0, f1;
  for (std::size_t trial = 0; trial < po.trials; ++trial) {
    random_pair(rng, *grid, f0, f1);
    const double v = interaction_positivity(K, f0, f1);
    if (v < min_value) {
      min_value = v;
      argmin = trial;
      worst_f0 = f0;
      worst_f1 = f1;
    }
    rows.push_back({static_cast<double>(trial), v});
  }
  write_csv(oo.dir + "/positivity_result.csv", {"trial", "value"}, rows);

  double refined = min_value;
  if (po.descent > 0 && !worst_f0.empty()) {
    refined = coordinate_descent(K, *grid, worst_f0, worst_f1, po.descent, min_value);
  }

  const double floor = -1e-10;
  std::string status;
  if (po.lambda <= 4.0 + 1e-12) {
    status = std::min(min_value, refined) >= floor ? "pass" : "violation";
  } else if (std::min(min_value, refined) < floor) {
    status = "counterexample";
  } else {
    status = "inconclusive";
  }

  say(out, "min_value", min_value);
  say(out, "argmin_trial", static_cast<double>(argmin));
  if (po.descent > 0) say(out, "descent_value", refined);
  out << "status=" << status << "\n";
  if (status == "inconclusive") {
    out << "note=no counterexample found; a search cannot certify positivity\n";
  }

  Meta meta;
  meta.emplace_back("command", "positivity");
  meta.emplace_back("dim", std::to_string(po.dim));
  meta.emplace_back("lambda", g17(po.lambda));
  meta.emplace_back("radius", g17(po.radius));
  meta.emplace_back("cells", std::to_string(po.cells));
  meta.emplace_back("quad_order", std::to_string(po.quad_order));
  meta.emplace_back("seed", std::to_string(po.seed));
  meta.emplace_back("trials", std::to_string(po.trials));
  meta.emplace_back("descent", std::to_string(po.descent));
  meta.emplace_back("min_value", g17(min_value));
  meta.emplace_back("descent_value", g17(refined));
  meta.emplace_back("status", status);
  write_run_manifest(oo, "positivity", std::move(meta), {"positivity_result.csv"});
  return 0;
}

// ---------------------------------------------------------------------------
// rates

int cmd_rates(const RatesOpts& ro, const OutOpts& oo, std::ostream& out, std::ostream& err) {
  if (oo.check) return check_and_report(oo, "rates", out, err);
  ensure_outdir(oo);
  const Table tab = read_csv(ro.input);
  const auto t = tab.column("t");
  const auto y = tab.column(ro.column);
  const FitOptions fo{ro.window_start, ro.window_end, ro.floor};

  const double nan = std::numeric_limits<double>::quiet_NaN();
  DecayFit efit, afit, best;
  bool have_e = false, have_a = false;
  if (ro.kind == "auto") {
    const DecayComparison cmp = classify_decay(t, y, fo);
    efit = cmp.exponential;
    afit = cmp.algebraic;
    have_e = have_a = true;
    best = cmp.best == DecayKind::Exponential ? efit : afit;
  } else if (ro.kind == "exponential") {
    efit = fit_decay(t, y, DecayKind::Exponential, fo);
    have_e = true;
    best = efit;
  } else {
    afit = fit_decay(t, y, DecayKind::Algebraic, fo);
    have_a = true;
    best = afit;
  }

  out << "kind=" << decay_kind_name(best.kind) << "\n";
  say(out, "rate", best.rate);
  say(out, "prefactor", best.prefactor);
  say(out, "r_squared", best.r_squared);
  say(out, "n_used", static_cast<double>(best.n_used));
  say(out, "window_start", best.window_start);
  say(out, "window_end", best.window_end);

  write_csv(oo.dir + "/rates_result.csv",
            {"rate", "prefactor", "r_squared", "n_used", "window_start", "window_end",
             "exp_rate", "exp_prefactor", "exp_r2", "alg_rate", "alg_prefactor", "alg_r2",
             "best_exponential"},
            {{best.rate, best.prefactor, best.r_squared, static_cast<double>(best.n_used),
              best.window_start, best.window_end, have_e ? efit.rate : nan,
              have_e ? efit.prefactor : nan, have_e ? efit.r_squared : nan,
              have_a ? afit.rate : nan, have_a ? afit.prefactor : nan,
              have_a ? afit.r_squared : nan,
              best.kind == DecayKind::Exponential ? 1.0 : 0.0}});

  Meta meta;
  meta.emplace_back("command", "rates");
  meta.emplace_back("input", ro.input);
  meta.emplace_back("input_fnv1a64", [&] {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(ro.input)));
    return std::string(buf);
  }());
  meta.emplace_back("column", ro.column);
  meta.emplace_back("kind", decay_kind_name(best.kind));
  meta.emplace_back("rate", g17(best.rate));
  meta.emplace_back("r_squared", g17(best.r_squared));
  write_run_manifest(oo, "rates", std::move(meta), {"rates_result.csv"});
  return 0;
}

bool parameter_rejection(ErrorCode code) {
  switch (code) {
    case ErrorCode::QOutOfRange:
    case ErrorCode::LambdaOutOfRange:
    case ErrorCode::BadParams:
    case ErrorCode::BadGridSpec:
    case ErrorCode::GridMismatch:
    case ErrorCode::GammaDomain:
      return true;
    default:
      return false;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"radially symmetric fast-diffusion laboratory"};
  app.require_subcommand(1);

  ModelOpts st_model;
  GridOpts st_grid;
  st_grid.cells = 1024;
  FixedPointOptions st_fp;
  OutOpts st_out;
  auto* st = app.add_subcommand("stationary", "construct a stationary state and its residuals");
  add_model_options(st, st_model);
  add_grid_options(st, st_grid);
  add_fp_options(st, st_fp);
  add_out_options(st, st_out);

  ModelOpts ev_model;
  GridOpts ev_grid;
  FixedPointOptions ev_fp;
  EvolveOpts ev_opts;
  OutOpts ev_out;
  auto* ev = app.add_subcommand("evolve", "march an initial datum and record diagnostics");
  const ModelOptionHandles ev_handles = add_model_options(ev, ev_model);
  add_grid_options(ev, ev_grid);
  add_fp_options(ev, ev_fp);
  ev->add_option("--t-end", ev_opts.t_end, "final time")->capture_default_str();
  ev->add_option("--snapshot-every", ev_opts.snapshot_every, "diagnostics cadence")
      ->capture_default_str();
  ev->add_option("--dt", ev_opts.dt, "initial step, 0 picks the monotone bound")
      ->capture_default_str();
  ev->add_option("--cfl", ev_opts.cfl, "fraction of the monotone step bound")
      ->capture_default_str();
  ev->add_flag("--fixed-dt", ev_opts.fixed_dt, "disable step adaptation; --dt is then required");
  ev->add_flag("--no-entropy-guard", ev_opts.no_entropy_guard,
               "accept steps that raise the free energy");
  ev->add_option("--init", ev_opts.init,
                 "builtin initial datum, barenblatt:<h-factor> or perturb:<amplitude>");
  ev->add_option("--initial", ev_opts.initial, "initial datum from a snapshot file");
  ev->add_option("--compare", ev_opts.compare,
                 "second initial snapshot; runs the pair and records the L1 distance");
  add_out_options(ev, ev_out);

  ModelOpts hp_model;
  GridOpts hp_grid;
  hp_grid.cells = 2048;
  FixedPointOptions hp_fp;
  HpOpts hp_opts;
  OutOpts hp_out;
  auto* hp = app.add_subcommand("hp", "Hardy-Poincare constant of a stationary weight");
  add_model_options(hp, hp_model);
  add_grid_options(hp, hp_grid);
  add_fp_options(hp, hp_fp);
  hp->add_option("--tol", hp_opts.tol, "inverse-iteration tolerance")->capture_default_str();
  hp->add_option("--max-iter", hp_opts.max_iter, "inverse-iteration cap")->capture_default_str();
  add_out_options(hp, hp_out);

  ModelOpts rh_model;
  rh_model.variant = "meanfield";
  GridOpts rh_grid;
  FixedPointOptions rh_fp;
  SampleOpts rh_sample;
  OutOpts rh_out;
  auto* rh = app.add_subcommand("rhls", "sample the reverse-HLS quotient around the minimizer");
  add_model_options(rh, rh_model, /*with_variant=*/false);
  add_grid_options(rh, rh_grid);
  add_fp_options(rh, rh_fp);
  rh->add_option("--seed", rh_sample.seed, "random seed")->required();
  rh->add_option("--trials", rh_sample.trials, "perturbations to draw")->capture_default_str();
  rh->add_option("--eps", rh_sample.eps, "perturbation amplitude")->capture_default_str();
  add_out_options(rh, rh_out);

  PositivityOpts po_opts;
  OutOpts po_out;
  auto* po = app.add_subcommand("positivity", "sample the constrained interaction form");
  po->add_option("--dim", po_opts.dim, "space dimension")->capture_default_str();
  po->add_option("--lambda", po_opts.lambda, "interaction exponent")->capture_default_str();
  po->add_option("--radius", po_opts.radius, "truncation radius")->capture_default_str();
  po->add_option("--cells", po_opts.cells, "radial cell count")->capture_default_str();
  po->add_option("--quad-order", po_opts.quad_order, "angular quadrature order")
      ->capture_default_str();
  po->add_option("--seed", po_opts.seed, "random seed")->required();
  po->add_option("--trials", po_opts.trials, "pairs to draw")->capture_default_str();
  po->add_option("--descent", po_opts.descent,
                 "coordinate-descent sweeps refining the worst sample")
      ->capture_default_str();
  add_out_options(po, po_out);

  RatesOpts ra_opts;
  OutOpts ra_out;
  auto* ra = app.add_subcommand("rates", "fit a decay law to a recorded series");
  ra->add_option("--input", ra_opts.input, "series CSV with a t column")->required();
  ra->add_option("--column", ra_opts.column, "series column to fit")->capture_default_str();
  ra->add_option("--kind", ra_opts.kind, "decay law")
      ->check(CLI::IsMember({"auto", "exponential", "algebraic"}))
      ->capture_default_str();
  ra->add_option("--window-start", ra_opts.window_start,
                 "fit window start; negative selects the last half")
      ->capture_default_str();
  ra->add_option("--window-end", ra_opts.window_end, "fit window end; 0 means none")
      ->capture_default_str();
  ra->add_option("--floor", ra_opts.floor, "resolution floor; samples below 100x are dropped")
      ->capture_default_str();
  add_out_options(ra, ra_out);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      return app.exit(e, out, err);
    }
    err << "error: " << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return 2;
  }

  try {
    if (st->parsed()) return cmd_stationary(st_model, st_grid, st_fp, st_out, out, err);
    if (ev->parsed())
      return cmd_evolve(ev_model, ev_handles, ev_grid, ev_fp, ev_opts, ev_out, out, err);
    if (hp->parsed()) return cmd_hp(hp_model, hp_grid, hp_fp, hp_opts, hp_out, out, err);
    if (rh->parsed()) return cmd_rhls(rh_model, rh_grid, rh_fp, rh_sample, rh_out, out, err);
    if (po->parsed()) return cmd_positivity(po_opts, po_out, out, err);
    if (ra->parsed()) return cmd_rates(ra_opts, ra_out, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return parameter_rejection(e.code) ? 2 : 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace fdlab::cli
