#pragma once

// Transverse spectral data on (-a, a): analytic eigenvalues/eigenfunctions of
// the 1D operator with Dirichlet at one end and Neumann at the other, and
// their discrete (lumped piecewise-linear) counterparts.
//
// Analytic modes: E_n = (2n-1)^2 (pi/(4a))^2, J_n(y2) = sqrt(1/a) *
// sin(k_n (y2 + a)) with k_n = sqrt(E_n). (The n-th mode vanishes at -a and
// has zero derivative at +a; the ND orientation is its reflection.)

#include <vector>

#include "stripheat/kernels.hpp"

namespace stripheat {

enum class Orientation { DN, ND };  // Dirichlet at -a / at +a

double eigenvalue_dn(int n, double a);
double wavenumber_dn(int n, double a);
// Orthonormal DN mode value at y2 (|y2| <= a required).
double eigenfunction_dn(int n, double a, double y2);
// ND mode = DN mode reflected: eigenfunction_dn(n, a, -y2).
double eigenfunction_nd(int n, double a, double y2);

struct DiscreteTransverse {
  Orientation orientation = Orientation::DN;
  double a = 1.0;
  int n2 = 0;
  kern::Tridiag op;             // stiffness tridiagonal + lumped mass
  std::vector<int> active_j;    // grid j-index per transverse dof
  double e1h = 0.0;             // lowest generalized eigenvalue
  std::vector<double> ground;   // M-normalized ground vector

  // k-th smallest eigenvalue (0-based), by Sturm bisection.
  double eigenvalue(int k) const { return kern::tridiag_eigenvalue(op, k); }
};

// Lumped piecewise-linear discretization with n2 intervals (n2 >= 4).
// E_1^h is resolved to bisection exhaustion (a few ulps): it is used as the
// spectral shift in the 2D operators, where any error is amplified by e^s.
DiscreteTransverse discrete_transverse(double a, int n2, Orientation orientation);

}  // namespace stripheat
