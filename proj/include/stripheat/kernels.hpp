#pragma once

// Low-level numerical kernels: CSR symmetric matrices, banded Cholesky
// (LAPACK), deterministic OpenMP reductions, compensated summation and
// tridiagonal Sturm-sequence eigenvalue tools.
//
// Parallel kernels are written so that results are bit-identical for any
// thread count: parallelism is over independent output elements, and
// reductions accumulate fixed-size chunks that are combined serially.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace stripheat::kern {

// Neumaier variant of Kahan summation; error ~ 1 ulp of sum |x_i|.
struct CompensatedSum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

// Symmetric sparse matrix in CSR with both triangles stored (simplifies
// row-parallel SpMV). Column indices strictly increasing within each row.
struct SparseSym {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  std::size_t nnz() const { return col.size(); }
};

// Accumulates (row, col, value) contributions; duplicates are merged on
// finalize. Deterministic: entries are sorted by (row, col).
class TripletBuffer {
 public:
  explicit TripletBuffer(int n) : n_(n) {}
  void add(int r, int c, double v) { entries_.push_back({r, c, v}); }
  // Adds v at (r,c) and (c,r) plus the two diagonal terms of an edge
  // contribution c*(x_r - x_c)^2.
  void add_edge(int r, int c, double coeff) {
    add(r, r, coeff);
    add(c, c, coeff);
    add(r, c, -coeff);
    add(c, r, -coeff);
  }
  SparseSym finalize() const;

 private:
  struct Entry {
    int r, c;
    double v;
  };
  int n_;
  std::vector<Entry> entries_;
};

// y = A x. Row-parallel; bit-identical for any thread count.
void spmv(const SparseSym& A, const double* x, double* y);
void spmv_serial(const SparseSym& A, const double* x, double* y);

// Deterministic dot product: fixed 4096-element chunks accumulated in
// parallel, combined serially in chunk order.
double dot(std::span<const double> x, std::span<const double> y);
double dot_serial(std::span<const double> x, std::span<const double> y);

// Weighted dot sum x_i m_i y_i (diagonal mass inner product).
double dot_weighted(std::span<const double> x, std::span<const double> m,
                    std::span<const double> y);

void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);

// Lower-triangle symmetric band matrix, LAPACK column-major band storage:
// ab[j*(bw+1) + (i-j)] = A(i,j) for j <= i <= min(n-1, j+bw).
struct BandMatrix {
  int n = 0;
  int bw = 0;
  std::vector<double> ab;
  bool factored = false;
};

// Builds the band representation of alpha*A + diag_shift (entrywise added to
// the diagonal; pass e.g. -sigma*m for shift-invert, or alpha = dt/2 with the
// mass as shift for an implicit time step).
BandMatrix band_from_csr(const SparseSym& A, std::span<const double> diag_shift,
                         double alpha = 1.0);
int bandwidth(const SparseSym& A);

// In-place Cholesky (LAPACK dpbtrf). Returns false if not positive definite.
bool band_cholesky(BandMatrix& B);
// Solves B x = rhs in place using the factored band (LAPACK dpbtrs).
void band_solve(const BandMatrix& B, std::span<double> x);

// Generalized symmetric tridiagonal eigenproblem K v = lambda M v with
// diagonal mass. diag/mass have length n, off has length n-1.
struct Tridiag {
  std::vector<double> diag;
  std::vector<double> off;
  std::vector<double> mass;
  int n() const { return static_cast<int>(diag.size()); }
};

// Number of eigenvalues strictly below x (Sturm sequence / LDL^T inertia).
int sturm_count(const Tridiag& T, double x);

// k-th smallest eigenvalue (k = 0-based) by bisection, iterated until the
// bracketing interval collapses to a few ulps.
double tridiag_eigenvalue(const Tridiag& T, int k);

// M-normalized eigenvector for an eigenvalue estimate lambda (inverse
// iteration with a slightly shifted LDL^T factorization). The sign is fixed
// so the largest-|.| component is positive.
std::vector<double> tridiag_eigenvector(const Tridiag& T, double lambda);

// Gershgorin lower bound for the pencil (A, M): min_i (A_ii - sum_{j!=i}
// |A_ij|) / m_i.
double gershgorin_lower_bound(const SparseSym& A, std::span<const double> m);

// Row-scale estimate of ||M^{-1} A||_inf = max_i sum_j |A_ij| / m_i; used for
// the honest floating-point floor of eigen residuals.
double operator_scale(const SparseSym& A, std::span<const double> m);

// Simpson weights for n intervals (n even) of width h: h/3 * {1,4,2,...,4,1}.
std::vector<double> simpson_weights(int n, double h);

}  // namespace stripheat::kern
