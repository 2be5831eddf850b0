#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace stripheat {

inline constexpr const char* kVersion = "0.1.0";

// Boundary layout of the strip R x (-a, a). Untwisted: Dirichlet along the
// whole bottom wall, Neumann along the whole top wall. Twisted: the roles
// swap across x1 = 0 (bottom Dirichlet for x1 <= 0, top Dirichlet for
// x1 >= 0; both junction wall nodes are Dirichlet, see geometry.hpp).
enum class Theta { Untwisted, Twisted };

inline const char* theta_name(Theta t) {
  return t == Theta::Untwisted ? "0" : "pi";
}

struct StripConfig {
  double a = 1.0;
  Theta theta = Theta::Untwisted;

  void validate() const {
    if (!(a > 0.0)) throw std::invalid_argument("StripConfig: a must be > 0");
  }
};

// Uniform tensor grid on [-X, X] x [-a, a]. n1 must be even so that a node
// sits exactly on the switching abscissa x1 = 0. Node coordinates are
// computed as (i - n1/2) * h1, which makes the switching node exactly 0.0
// (the textbook form -X + i*h1 can land an ulp off zero and silently flip
// the junction-column boundary classification).
struct Grid2D {
  double x1_extent = 0.0;  // X
  double a = 0.0;
  int n1 = 0;  // longitudinal intervals (even)
  int n2 = 0;  // transverse intervals

  Grid2D() = default;
  Grid2D(double X, double a_, int n1_, int n2_)
      : x1_extent(X), a(a_), n1(n1_), n2(n2_) {
    if (!(X > 0.0) || !(a_ > 0.0))
      throw std::invalid_argument("Grid2D: extents must be positive");
    if (n1_ < 2 || n1_ % 2 != 0)
      throw std::invalid_argument("Grid2D: n1 must be even and >= 2");
    if (n2_ < 1) throw std::invalid_argument("Grid2D: n2 must be >= 1");
  }

  double h1() const { return 2.0 * x1_extent / n1; }
  double h2() const { return 2.0 * a / n2; }
  double x1(int i) const { return (i - n1 / 2) * h1(); }
  double x2(int j) const { return -a + j * h2(); }
  int n_nodes() const { return (n1 + 1) * (n2 + 1); }
  int node_index(int i, int j) const { return i * (n2 + 1) + j; }
};

// Gaussian weight K(x) = exp(x1^2 / 4) that defines the restricted class of
// initial data; only log_K is exposed so callers can stay in the log domain
// when x1 is large.
inline double log_weight_K(double x1) { return 0.25 * x1 * x1; }

}  // namespace stripheat
