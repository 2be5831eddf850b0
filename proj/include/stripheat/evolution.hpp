#pragma once

// Crank-Nicolson evolution of the shifted heat equation, norm traces, the
// self-similar change of variables, and the power-iteration estimate of the
// weighted-to-unweighted semigroup norm.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stripheat/operators.hpp"

namespace stripheat {

// Grid function over active DOFs. For physical fields t is the evolution
// time; fields produced by to_selfsimilar carry t = s (the self-similar
// parameter) instead, as documented at the function. `owned` keeps an
// internally created discretization alive (to_selfsimilar_auto); callers
// with a long-lived Discretization can leave it empty.
struct Field {
  const Discretization* disc = nullptr;
  std::shared_ptr<const Discretization> owned;
  double t = 0.0;
  std::vector<double> v;
};

// Samples f(x1, x2) at the active nodes (t = 0).
Field nodal_field(const Discretization& disc,
                  const std::function<double(double, double)>& f);

double field_norm(const Field& u);  // sqrt(sum_i m_i u_i^2)

// sqrt(sum_i m_i K(x1_i) u_i^2) with K = exp(x1^2/4). Evaluated per-term in
// the log domain once x1^2/4 is large, so huge weights times tiny values
// cannot produce inf * 0.
double weighted_norm(const Field& u);

struct NormTrace {
  std::vector<double> t;
  std::vector<double> norm;
  std::vector<double> weighted;  // K-norm of the self-similar representative
  Theta theta = Theta::Untwisted;
  std::string grid_id;
};

// One Crank-Nicolson step solves (M + dt/2 A) u+ = (M - dt/2 A) u.
// Factorizations are cached per dt (exact bit pattern).
class CnStepper {
 public:
  explicit CnStepper(const SymmetricForm& form) : form_(&form) {}
  void step(Field& u, double dt);
  std::size_t cached_factorizations() const { return cache_.size(); }

 private:
  const SymmetricForm* form_;
  std::map<std::uint64_t, kern::BandMatrix> cache_;
  std::vector<double> tmp_;
};

struct EvolveOptions {
  double dt_min = 1e-3;
  double dt_max = 1.0;
  double divisor = 64.0;  // dt = clamp(t/divisor, dt_min, dt_max)
  bool with_weighted = true;
  bool keep_fields = false;
};

struct EvolveResult {
  NormTrace trace;
  std::vector<Field> fields;  // at checkpoints, only if keep_fields
};

// Steps from u0.t through the checkpoints. dt is piecewise constant per
// span with dt = clamp(t_span_start/divisor, dt_min, dt_max); spans longer
// than a doubling of t are subdivided internally so the clamp always sees a
// current t. The weighted column is the K-norm of the self-similar
// representative at s = log(1+t) (the physical K-norm diverges with the
// domain for large t and is not a meaningful trace quantity).
EvolveResult evolve(const SymmetricForm& form, const Field& u0,
                    std::span<const double> checkpoints, const EvolveOptions& opts = {});

// u(x1, x2, t) -> e^{s/4} u(e^{s/2} y1, x2, t) on the target grid, with
// s = log(1+u.t); piecewise-linear interpolation in x1, exact at s = 0 when
// the grids coincide. The returned field carries t = s. Requires the target
// window to fit inside e^{-s/2} [-X, X].
Field to_selfsimilar(const Field& u, const Discretization& target);

// Inverse map; ss.t is interpreted as s, the result carries t = e^s - 1.
// Requires the target window to fit inside e^{s/2} [-L, L].
Field from_selfsimilar(const Field& ss, const Discretization& target);

// Deterministic target for the trace's weighted column: same h1 and n2 as
// the source, y-extent min(12, 0.98 X e^{-s/2}) rounded down to a multiple
// of h1.
Field to_selfsimilar_auto(const Field& u);

struct SemigroupNormEstimate {
  double t = 0.0;
  double estimate = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string grid_id;
};

struct NormOptions {
  double tol = 1e-5;  // power-iteration residual, relative
  int max_iter = 60;
  double h1 = 0.1;
  int n2 = 40;
  double x_floor = 30.0;
  EvolveOptions evolve_opts;
};

// ||S_theta(t)||_{L2(K)->L2} via the doubled-time trick: S(t) is
// self-adjoint, so the square of the norm is the top eigenvalue of
// K^{-1/2} S(2t) K^{-1/2}, estimated by power iteration. Each application
// multiplies by K^{-1/2}, evolves to 2t, multiplies again; the evolution
// schedule (and its factorizations) is built once and reused across
// iterations. Start vector: K^{-1/2} (Gaussian exp(-x1^2/8) x transverse
// ground profile).
SemigroupNormEstimate semigroup_norm(const StripConfig& config, double t,
                                     const NormOptions& opts = {});

// Initial data used across experiments.
Field make_gaussian_mode1(const Discretization& disc);  // e^{-x1^2/2} J_1(x2)
// e^{-x1^2/2} cos(pi x2 / (2a)): vanishes on both walls, admissible for
// either layout (used for twisted-vs-untwisted ratio runs).
Field make_gaussian_bump(const Discretization& disc);

}  // namespace stripheat
