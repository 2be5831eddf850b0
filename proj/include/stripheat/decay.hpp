#pragma once

// Decay-rate extraction from norm data and the summary report that checks
// the measured rates, the spectral constants and the norm bound against
// each other.

#include <span>
#include <string>
#include <vector>

#include "stripheat/evolution.hpp"
#include "stripheat/spectral.hpp"

namespace stripheat {

struct DecayFit {
  double gamma = 0.0;  // v ~ C (1+t)^{-gamma} on the fit window
  double log_c = 0.0;
  double rms_log_residual = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int n_used = 0;
};

// Least squares of log v against log(1+t) over t in [t_lo, t_hi]. Throws if
// fewer than 8 samples fall in the window or any value there is <= 0.
DecayFit fit_rate(std::span<const double> t, std::span<const double> v,
                  double t_lo, double t_hi);

// exp(-integral_0^s mu) by trapezoid on the curve samples; the samples must
// cover [0, s] (first sample at 0, last >= s). Interpolates linearly to the
// endpoint.
double exponential_bound_from_mu(std::span<const double> s,
                                 std::span<const double> mu, double s_eval);

struct RatioFit {
  std::vector<double> t;
  std::vector<double> ratio;  // twisted / untwisted
  DecayFit fit;
};

// Fits the decay exponent of the norm ratio twisted/untwisted from two
// traces of the same initial data on the same time samples. An exponent
// near 1/2 is the signature of the extra t^{-1/2} gained by twisting.
RatioFit rate_ratio_test(const NormTrace& twisted, const NormTrace& untwisted,
                         double t_lo, double t_hi);

struct TheoremInputs {
  DecayFit fit_untwisted;   // from semigroup-norm samples
  DecayFit fit_twisted;
  DecayFit ratio_fit;       // from the trace-ratio run
  PositivityReport pos_untwisted;
  PositivityReport pos_twisted;
  std::vector<SemigroupNormEstimate> norms_untwisted;
  std::vector<SemigroupNormEstimate> norms_twisted;
  double slack = 0.05;      // multiplicative slack for the norm-bound check
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // distance to the nearest band edge (negative: fail)
  std::string detail;
};

struct TheoremReport {
  std::vector<CheckResult> checks;
  bool ok = false;
  double gamma0 = 0.0;
  double gamma_pi = 0.0;
  double ratio_exponent = 0.0;
  double c0h = 0.0;
  double cpih = 0.0;

  std::string render_text() const;
  std::string render_kv() const;
};

// Four checks: (straight) untwisted rate in [0.22, 0.28] and t^{1/4}-flat
// norms; (gain) ratio exponent in [0.35, 0.65] and twisted rate in
// [0.55, 0.90]; (bound) twisted norms below (1+t)^{-(c_pi+1/4)} up to
// slack; (constants) c_0 <= 1e-3 and c_pi >= 0.01. Throws listing what is
// missing if the inputs are incomplete.
TheoremReport theorem_report(const TheoremInputs& in);

}  // namespace stripheat
