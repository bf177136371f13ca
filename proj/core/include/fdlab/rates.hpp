#pragma once

#include <cstddef>
#include <vector>

namespace fdlab {

enum class DecayKind { Exponential, Algebraic };

const char* decay_kind_name(DecayKind k);

// Least-squares decay law on a late-time window.  Exponential fits
// log y = log(prefactor) - rate * t, Algebraic fits
// log y = log(prefactor) - rate * log(1 + t).
struct DecayFit {
  DecayKind kind = DecayKind::Exponential;
  double rate = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  std::size_t n_used = 0;
};

struct FitOptions {
  double t_start = -1.0;  // negative selects the last half of the series
  double t_end = 0.0;     // nonpositive means no upper cut
  double floor = 0.0;     // samples below 100 * floor are dropped
};

// Needs at least 10 usable samples (TooFewSamples) with positive values
// (NonPositiveValues).  The decay theorems are large-time statements, so the
// default window is the last half of the series.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y,
                   DecayKind kind, const FitOptions& opt = {});

// Both fits side by side; best names the higher r-squared.
struct DecayComparison {
  DecayFit exponential;
  DecayFit algebraic;
  DecayKind best = DecayKind::Exponential;
};

DecayComparison classify_decay(const std::vector<double>& t, const std::vector<double>& y,
                               const FitOptions& opt = {});

}  // namespace fdlab
