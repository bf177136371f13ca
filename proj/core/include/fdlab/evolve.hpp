#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fdlab/diagnostics.hpp"
#include "fdlab/kernels.hpp"
#include "fdlab/params.hpp"
#include "fdlab/profile.hpp"
#include "fdlab/stationary.hpp"

namespace fdlab {

// Explicit upwind solver controls.  Cell densities move with the velocity
// -d_r xi, xi = q/(q-1) u^{q-1} + V, through donor-cell interface fluxes with
// no-flux ends, so mass telescopes exactly.
struct SolverConfig {
  double dt_init = 0.0;        // 0 picks cfl_safety * stable_dt(u0)
  double cfl_safety = 0.9;     // fraction of the monotone bound used per step
  double t_end = 1.0;
  double snapshot_every = 0.1; // diagnostics cadence in time units
  bool entropy_guard = true;   // reject steps that raise the free energy
  bool adapt = true;           // halve on rejection, grow 1.2x after 50 accepts
};

struct RunResult {
  Profile final;
  std::vector<DiagnosticsRecord> series;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::vector<std::string> warnings;
  bool energy_monotone = false;
};

// One forward Euler step of the upwind flux.  The kernel supplies the
// mean-field potential and is ignored for the drift variant.  Throws
// StepTooLarge when a cell is driven to zero or below, NonFiniteState when
// the update stops being finite.
Profile step(const Profile& u, const ModelParams& p, const KernelMatrix* K, double dt);

// Largest dt for which the step map has nonnegative partial derivatives in
// every cell value, hence preserves ordering and positivity.  The bound is
// min_i V_i / S_i with S_i collecting the outflow velocities and the donor
// masses times phi''(u_i) = q u_i^{q-2} across both faces of cell i.
double stable_dt(const Profile& u, const ModelParams& p, const KernelMatrix* K = nullptr);

// Monotone bound valid simultaneously for every state between the pointwise
// min and max of u and w: velocities are maximized over the corner states and
// phi'' over the smaller density.  Drift only; a shared dt below this bound
// makes the joint update order preserving, which yields the comparison
// principle and the L1 contraction.
double pair_stable_dt(const Profile& u, const Profile& w, const ModelParams& p);

// March u0 to t_end recording diagnostics every snapshot_every time units
// (plus t = 0 and t_end).  Adaptive mode halves dt on positivity or entropy
// rejections and fails once dt underflows 1e-15; fixed-dt mode (adapt false)
// turns any rejection into an error.  Start-up checks append warnings instead
// of failing: initial trap condition q/(1-q) u0^{q-1} - V > 0, and the
// u0 / reference ratio staying within [1e-2, 1e2] with no empty cells.
RunResult run(const Profile& u0, const ModelParams& p, const SolverConfig& cfg,
              const StationaryState& ref, const KernelMatrix* K = nullptr);

struct PairRunResult {
  Profile final_a;
  Profile final_b;
  std::vector<double> times;
  std::vector<double> l1;      // |a - b|_1 at the recording cadence
  double min_order_gap = 0.0;  // min over time and cells of b - a
  std::size_t steps = 0;
};

// Advance two drift states with the common step cfl_safety * pair_stable_dt.
PairRunResult run_pair(const Profile& a0, const Profile& b0, const ModelParams& p,
                       const SolverConfig& cfg);

struct DissipationReport {
  double max_defect = 0.0;      // |dF/dt + avg Fisher| over record intervals
  double max_defect_rel = 0.0;  // defect / (1 + avg Fisher) per interval
};

// Compare free-energy decrements against the trapezoid of the recorded Fisher
// values.  Needs at least two records.
DissipationReport dissipation_check(const std::vector<DiagnosticsRecord>& series);

}  // namespace fdlab
