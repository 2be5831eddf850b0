#pragma once

// Smallest-eigenpair engine (shift-invert inverse iteration with Rayleigh
// acceleration) and the spectral curve s -> mu_theta(s) of the self-similar
// family, with the two eigenvector diagnostics that witness the emergent
// Dirichlet condition at the junction: the junction-column amplitude and the
// residual orthogonal to the per-side transverse ground profile.

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "stripheat/operators.hpp"

namespace stripheat {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EigenOptions {
  double tol = 1e-9;  // residual target, relative to max(1, |lambda|)
  int max_iter = 200;
  // Known lower bound for the spectrum (e.g. the harmonic-oscillator floor
  // of the self-similar family). Without it the shift starts from the
  // Gershgorin bound, which can be hopelessly far below for stiff forms.
  std::optional<double> lower_bound;
  std::optional<std::vector<double>> start;
};

struct EigenResult {
  double lambda = 0.0;
  std::vector<double> v;   // M-normalized, largest component positive
  double residual = 0.0;   // ||A v - lambda M v||_{M^{-1/2}}
  int iterations = 0;
  bool converged = false;
};

// Residuals cannot drop below ~eps * ||M^{-1}A||; convergence is declared at
// residual <= max(tol * max(1,|lambda|), 8 eps * scale). The eigenvalue
// error is bounded by residual^2 / gap either way.
EigenResult smallest_eigenpair(const SymmetricForm& form, const EigenOptions& opts = {});

struct CurveSample {
  double s = 0.0;
  double mu = 0.0;
  double junction_amplitude = 0.0;
  double offmode_residual_sq = 0.0;
  double solver_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct SpectralCurve {
  Theta theta = Theta::Untwisted;
  double a = 1.0;
  SsGridSpec grid;
  std::vector<CurveSample> samples;

  bool complete() const {
    for (const auto& s : samples)
      if (!s.converged) return false;
    return !samples.empty();
  }
};

// Solves the family per sample (strictly increasing s required). mu is
// re-evaluated from the eigenvector via the compensated split quotient, so
// the untwisted curve is flat to ~1e-11 across s.
SpectralCurve mu_curve(const StripConfig& config, std::span<const double> s_samples,
                       const SsGridSpec& grid, double tol = 1e-9,
                       JunctionConvention conv = JunctionConvention::Closed);

// Column-wise projection of an eigenvector onto the per-side discrete
// transverse ground profile (DN left of the junction, ND right of it for the
// twisted layout; DN everywhere untwisted). The junction column itself
// belongs entirely to the residual. Returns the projected part and
// ||v - proj||_M^2.
std::pair<std::vector<double>, double> project_h1(std::span<const double> v,
                                                  const Discretization& disc);

// M-norm of the eigenvector restricted to the switching column y1 = 0.
double junction_amplitude(std::span<const double> v, const Discretization& disc);

struct PositivityReport {
  Theta theta = Theta::Untwisted;
  double c_h = 0.0;         // min_k mu_k - 1/4 (analytic reference constant)
  double floor = 0.0;       // lowest eigenvalue of the discrete 1D oscillator
  double min_margin = 0.0;  // min_k (mu_k - floor)
  double flat_spread = 0.0; // max_k |mu_k - mu_0|
  bool is_flat_like = false;
  std::vector<int> violations;  // twisted samples at or below floor + margin
  bool ok = false;
};

PositivityReport positivity_check(const SpectralCurve& curve, double margin = 1e-3);

}  // namespace stripheat
