#pragma once

// Sparse symmetric forms: the physical shifted operator on the truncated
// strip, the self-similar family A(s) = A_long + V_harm + e^s (A_trans -
// E_1^h M), and the 1D harmonic oscillators (with and without an extra
// Dirichlet condition at 0).
//
// All assembly is variational: piecewise-linear edge energies with lumped
// (diagonal) mass, potentials sampled at nodes. Matrices are exactly
// symmetric by construction.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stripheat/geometry.hpp"
#include "stripheat/kernels.hpp"
#include "stripheat/transverse.hpp"

namespace stripheat {

enum class FormKind { Physical, SelfSimilar, Harmonic1D };

struct FormDescriptor {
  FormKind kind = FormKind::Physical;
  Theta theta = Theta::Untwisted;
  double a = 1.0;
  double s = 0.0;           // self-similar parameter (0 for physical forms)
  double extent = 0.0;      // X (physical) or L (self-similar / harmonic)
  int n1 = 0;
  int n2 = 0;
  double e1h = 0.0;         // spectral shift actually used
  JunctionConvention junction = JunctionConvention::Closed;
  std::string warning;      // set e.g. by the conditioning guard

  std::string grid_id() const;
};

struct SymmetricForm {
  kern::SparseSym A;
  std::vector<double> mass;
  FormDescriptor desc;

  int dim() const { return A.n; }
};

// Physical operator: edge energies minus the E_1^h shift, on the truncated
// strip with the theta wall layout. The quadratic form is
//   v -> sum_edges c_e (dv)^2 - e1h * sum_i m_i v_i^2,
// which is >= 0 (the transverse part of every column dominates the shift).
SymmetricForm assemble_physical(const Discretization& disc);

// Grid for the self-similar problems: [-L, L] x (-a, a), Dirichlet at +-L.
struct SsGridSpec {
  double L = 12.0;
  int n1 = 16000;
  int n2 = 40;
};

// The family s -> A(s). Assembled once; forms at any s share the sparsity
// pattern (A(s) - A(0) = (e^s - 1)(A_trans - E_1^h M) holds entrywise).
// rayleigh() evaluates the quotient from the edge lists with compensated
// sums, keeping the e^s-scaled block separate until the final scalar
// combination; this is what makes the untwisted curve flat to ~1e-11 even
// at s = 12 where the assembled matrix entries reach ~1e6.
class SelfSimilarFamily {
 public:
  SelfSimilarFamily(const StripConfig& config, const SsGridSpec& spec,
                    JunctionConvention conv = JunctionConvention::Closed);

  const Discretization& disc() const { return disc_; }
  double e1h() const { return e1h_; }

  SymmetricForm form_at(double s) const;
  double rayleigh(double s, std::span<const double> v) const;

  // Base (s-independent) and scale parts on the shared pattern; exposed for
  // structural tests.
  const kern::SparseSym& pattern() const { return pattern_; }
  std::span<const double> val_base() const { return val_base_; }
  std::span<const double> val_scale() const { return val_scale_; }

 private:
  Discretization disc_;
  double e1h_ = 0.0;
  kern::SparseSym pattern_;       // values unused
  std::vector<double> val_base_;  // A_long + V_harm
  std::vector<double> val_scale_; // A_trans - e1h * M

  struct Edge {
    int r;      // active dof
    int c;      // active dof or -1 (eliminated neighbor, value 0)
    double coeff;
  };
  std::vector<Edge> long_edges_, trans_edges_;
  std::vector<double> harm_;  // m_i * y1_i^2 / 16 per dof
};

SymmetricForm assemble_selfsimilar(const StripConfig& config, const SsGridSpec& spec,
                                   double s,
                                   JunctionConvention conv = JunctionConvention::Closed);

struct HarmonicOscillator1D {
  double L = 12.0;
  int n = 1200;
  bool dirichlet_at_zero = false;  // false -> H, true -> H_D
};

// -d^2/dy^2 + y^2/16 on [-L, L], Dirichlet ends; optionally an extra
// Dirichlet dof removal at y = 0 (requires a node there, i.e. n even).
SymmetricForm assemble_harmonic(const HarmonicOscillator1D& ho);
kern::Tridiag harmonic_tridiag(const HarmonicOscillator1D& ho);

// Lowest k eigenvalues of the harmonic problem by Sturm bisection.
std::vector<double> harmonic_eigenvalues(const HarmonicOscillator1D& ho, int k);

}  // namespace stripheat
