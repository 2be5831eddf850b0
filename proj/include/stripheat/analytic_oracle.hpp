#pragma once

// Closed-form references for the untwisted strip: the heat kernel as a
// transverse mode sum over the 1D Gaussian kernel, a direct application of
// the solution operator through that sum (used to validate the time
// stepper), and a quadrature power iteration for the weighted-to-unweighted
// operator norm, which the 2D estimate must reproduce.

#include "stripheat/evolution.hpp"

namespace stripheat {

// 1D heat kernel (4 pi t)^{-1/2} exp(-(x-y)^2 / (4t)).
double gauss_kernel(double x, double y, double t);

struct StripKernelSpec {
  double a = 1.0;
  double t = 1.0;
  int n_max = 8;  // transverse modes kept
};

// Sup-norm bound on the dropped tail of the mode sum (crude geometric
// estimate; grows rapidly as t -> 0).
double truncation_bound(const StripKernelSpec& spec);

// Kernel of e^{(Delta + E_1) t} on the untwisted strip:
//   sum_n e^{(E_1 - E_n) t} p_t(x1, x1') J_n(x2) J_n(x2').
double strip_kernel(double x1, double x2, double x1p, double x2p,
                    const StripKernelSpec& spec);

// Applies the untwisted solution operator over a step t to a field on its
// own grid: transverse Simpson projection onto the first n_max modes, 1D
// Gaussian convolution per mode (Simpson in x1, parallel over output
// columns), mode resummation. Requires an untwisted layout and even n2.
Field apply_semigroup_untwisted(const Field& u0, double t, int n_max = 8);

// Closed-form norm of the untwisted semigroup L^2(K) -> L^2:
// t^{-1/4} (1 + 1/t + sqrt(1 + 2/t))^{-1/4}; the top eigenvalue of the
// weighted doubled-time Gaussian kernel is attained on a Gaussian, which
// makes the maximization elementary.
double norm_S0_exact(double t);

struct OracleNormOptions {
  double x1_extent = 25.0;
  int nq = 2000;  // Simpson intervals (even)
  double tol = 1e-9;
  int max_iter = 300;
};

struct OracleNorm {
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  double mode_tail = 0.0;  // bound on the ignored transverse-mode branch
};

// ||S_0(t)|| via the same doubled-time trick as the 2D code, but reduced to
// one dimension: power iteration on the Simpson-discretized symmetric kernel
// e^{-x^2/8} p_{2t}(x, y) e^{-y^2/8}. Requires t >= 1 (the quadrature grid
// is sized for spread kernels).
OracleNorm norm_S0_oracle(double t, double a, const OracleNormOptions& opts = {});

}  // namespace stripheat
