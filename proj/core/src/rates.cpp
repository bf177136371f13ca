#include "fdlab/rates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fdlab/errors.hpp"

namespace fdlab {

const char* decay_kind_name(DecayKind k) {
  return k == DecayKind::Exponential ? "exponential" : "algebraic";
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y,
                   DecayKind kind, const FitOptions& opt) {
  if (t.size() != y.size()) fail(ErrorCode::BadParams, "time and value lengths differ");
  if (t.empty()) fail(ErrorCode::TooFewSamples, "empty series");

  double t_lo = opt.t_start;
  if (t_lo < 0.0) t_lo = t.front() + 0.5 * (t.back() - t.front());
  const double t_hi = opt.t_end > 0.0 ? opt.t_end : t.back();

  std::vector<double> xs, zs;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (opt.floor > 0.0 && y[i] < 100.0 * opt.floor) continue;
    if (!(y[i] > 0.0)) {
      std::ostringstream msg;
      msg << "value " << y[i] << " at t = " << t[i] << " is not positive";
      fail(ErrorCode::NonPositiveValues, msg.str());
    }
    xs.push_back(kind == DecayKind::Exponential ? t[i] : std::log1p(t[i]));
    zs.push_back(std::log(y[i]));
  }
  if (xs.size() < 10) {
    std::ostringstream msg;
    msg << "only " << xs.size() << " usable samples in the window";
    fail(ErrorCode::TooFewSamples, msg.str());
  }

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, mz = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    mz += zs[i];
  }
  mx /= n;
  mz /= n;
  double sxx = 0.0, sxz = 0.0, szz = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dz = zs[i] - mz;
    sxx += dx * dx;
    sxz += dx * dz;
    szz += dz * dz;
  }
  if (!(sxx > 0.0)) fail(ErrorCode::BadParams, "window has no time spread");
  const double slope = sxz / sxx;

  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = zs[i] - mz - slope * (xs[i] - mx);
    ss_res += r * r;
  }
  DecayFit fit;
  fit.kind = kind;
  fit.rate = -slope;
  fit.prefactor = std::exp(mz - slope * mx);
  fit.r_squared = szz > 0.0 ? std::clamp(1.0 - ss_res / szz, 0.0, 1.0) : 1.0;
  fit.window_start = t_lo;
  fit.window_end = t_hi;
  fit.n_used = xs.size();
  return fit;
}

DecayComparison classify_decay(const std::vector<double>& t, const std::vector<double>& y,
                               const FitOptions& opt) {
  DecayComparison cmp;
  cmp.exponential = fit_decay(t, y, DecayKind::Exponential, opt);
  cmp.algebraic = fit_decay(t, y, DecayKind::Algebraic, opt);
  cmp.best = cmp.algebraic.r_squared > cmp.exponential.r_squared ? DecayKind::Algebraic
                                                                 : DecayKind::Exponential;
  return cmp;
}

}  // namespace fdlab
