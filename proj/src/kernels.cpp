#include "stripheat/kernels.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stripheat::kern {

SparseSym TripletBuffer::finalize() const {
  std::vector<Entry> sorted = entries_;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) {
    return a.r != b.r ? a.r < b.r : a.c < b.c;
  });
  SparseSym A;
  A.n = n_;
  A.row_ptr.assign(n_ + 1, 0);
  for (std::size_t k = 0; k < sorted.size();) {
    std::size_t k2 = k;
    double v = 0.0;
    while (k2 < sorted.size() && sorted[k2].r == sorted[k].r && sorted[k2].c == sorted[k].c) {
      v += sorted[k2].v;
      ++k2;
    }
    A.col.push_back(sorted[k].c);
    A.val.push_back(v);
    A.row_ptr[sorted[k].r + 1]++;
    k = k2;
  }
  for (int r = 0; r < n_; ++r) A.row_ptr[r + 1] += A.row_ptr[r];
  return A;
}

void spmv_serial(const SparseSym& A, const double* x, double* y) {
  for (int r = 0; r < A.n; ++r) {
    double acc = 0.0;
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) acc += A.val[k] * x[A.col[k]];
    y[r] = acc;
  }
}

void spmv(const SparseSym& A, const double* x, double* y) {
#pragma omp parallel for schedule(static)
  for (int r = 0; r < A.n; ++r) {
    double acc = 0.0;
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) acc += A.val[k] * x[A.col[k]];
    y[r] = acc;
  }
}

namespace {
constexpr std::ptrdiff_t kChunk = 4096;
}

double dot_serial(std::span<const double> x, std::span<const double> y) {
  // Same fixed chunk order as dot(), just without the parallel loop, so the
  // two agree bitwise and the reference really checks threading only.
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  CompensatedSum total;
  for (std::ptrdiff_t lo = 0; lo < n; lo += kChunk) {
    const std::ptrdiff_t hi = std::min(n, lo + kChunk);
    double acc = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) acc += x[i] * y[i];
    total.add(acc);
  }
  return total.value();
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  const std::ptrdiff_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(static_cast<std::size_t>(nchunks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
    const std::ptrdiff_t lo = c * kChunk;
    const std::ptrdiff_t hi = std::min(n, lo + kChunk);
    double acc = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) acc += x[i] * y[i];
    partial[static_cast<std::size_t>(c)] = acc;
  }
  // Serial combine in chunk order keeps the result independent of the
  // thread count.
  CompensatedSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

double dot_weighted(std::span<const double> x, std::span<const double> m,
                    std::span<const double> y) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  const std::ptrdiff_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(static_cast<std::size_t>(nchunks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
    const std::ptrdiff_t lo = c * kChunk;
    const std::ptrdiff_t hi = std::min(n, lo + kChunk);
    double acc = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) acc += x[i] * m[i] * y[i];
    partial[static_cast<std::size_t>(c)] = acc;
  }
  CompensatedSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.size()); ++i)
    y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> x) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.size()); ++i) x[i] *= alpha;
}

int bandwidth(const SparseSym& A) {
  int bw = 0;
  for (int r = 0; r < A.n; ++r)
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
      bw = std::max(bw, std::abs(r - A.col[k]));
  return bw;
}

BandMatrix band_from_csr(const SparseSym& A, std::span<const double> diag_shift,
                         double alpha) {
  BandMatrix B;
  B.n = A.n;
  B.bw = bandwidth(A);
  const int ld = B.bw + 1;
  B.ab.assign(static_cast<std::size_t>(ld) * A.n, 0.0);
  for (int r = 0; r < A.n; ++r) {
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
      const int c = A.col[k];
      if (c > r) continue;  // lower triangle only
      B.ab[static_cast<std::size_t>(c) * ld + (r - c)] = alpha * A.val[k];
    }
  }
  if (!diag_shift.empty()) {
    for (int i = 0; i < A.n; ++i) B.ab[static_cast<std::size_t>(i) * ld] += diag_shift[i];
  }
  return B;
}

bool band_cholesky(BandMatrix& B) {
  const lapack_int info = LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'L', B.n, B.bw,
                                         B.ab.data(), B.bw + 1);
  B.factored = (info == 0);
  return B.factored;
}

void band_solve(const BandMatrix& B, std::span<double> x) {
  if (!B.factored) throw std::logic_error("band_solve: matrix not factored");
  const lapack_int info =
      LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'L', B.n, B.bw, 1, B.ab.data(), B.bw + 1,
                     x.data(), B.n);
  if (info != 0) throw std::runtime_error("band_solve: dpbtrs failed");
}

int sturm_count(const Tridiag& T, double x) {
  // The recurrence runs in extended precision: the count can otherwise flip
  // inside a window of width ~eps * ||K||, which is an *absolute* error and
  // ruins small eigenvalues of stiff pencils (||K|| ~ 1/h^2 vs lambda ~ 1).
  const int n = T.n();
  int count = 0;
  long double d = static_cast<long double>(T.diag[0]) - static_cast<long double>(x) * T.mass[0];
  if (d < 0.0L) ++count;
  for (int i = 1; i < n; ++i) {
    long double prev = d;
    if (prev == 0.0L) prev = std::numeric_limits<double>::min();
    const long double off = T.off[i - 1];
    d = (static_cast<long double>(T.diag[i]) - static_cast<long double>(x) * T.mass[i]) -
        off * off / prev;
    if (d < 0.0L) ++count;
  }
  return count;
}

double tridiag_eigenvalue(const Tridiag& T, int k) {
  const int n = T.n();
  if (k < 0 || k >= n) throw std::invalid_argument("tridiag_eigenvalue: bad index");
  // Gershgorin bounds of M^{-1/2} K M^{-1/2}.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(T.off[i - 1]) / std::sqrt(T.mass[i - 1] * T.mass[i]);
    if (i < n - 1) radius += std::abs(T.off[i]) / std::sqrt(T.mass[i + 1] * T.mass[i]);
    const double center = T.diag[i] / T.mass[i];
    lo = std::min(lo, center - radius);
    hi = std::max(hi, center + radius);
  }
  // Bisection to interval exhaustion (a few ulps), so E_1^h is accurate
  // enough to survive the e^s amplification in the self-similar operator.
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(T, mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> tridiag_eigenvector(const Tridiag& T, double lambda) {
  const int n = T.n();
  // Factor K - sigma M with sigma slightly below lambda; tiny pivots are
  // boosted to keep the solve finite.
  const double sigma = lambda - std::max(1e-12, 1e-10 * std::abs(lambda));
  std::vector<double> d(n), l(n - 1);
  double scale_guard = 0.0;
  for (int i = 0; i < n; ++i) scale_guard = std::max(scale_guard, std::abs(T.diag[i]));
  scale_guard = std::max(scale_guard, 1.0) * 1e-300;
  d[0] = T.diag[0] - sigma * T.mass[0];
  if (std::abs(d[0]) < scale_guard) d[0] = scale_guard;
  for (int i = 1; i < n; ++i) {
    l[i - 1] = T.off[i - 1] / d[i - 1];
    d[i] = (T.diag[i] - sigma * T.mass[i]) - l[i - 1] * T.off[i - 1];
    if (std::abs(d[i]) < scale_guard) d[i] = scale_guard;
  }
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = T.mass[i];  // positive start
  for (int pass = 0; pass < 4; ++pass) {
    // Solve (K - sigma M) w = M v, overwrite v with normalized w.
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = T.mass[i] * v[i];
    for (int i = 1; i < n; ++i) rhs[i] -= l[i - 1] * rhs[i - 1];
    for (int i = 0; i < n; ++i) rhs[i] /= d[i];
    for (int i = n - 2; i >= 0; --i) rhs[i] -= l[i] * rhs[i + 1];
    double nrm2 = 0.0;
    for (int i = 0; i < n; ++i) nrm2 += T.mass[i] * rhs[i] * rhs[i];
    const double inv = 1.0 / std::sqrt(nrm2);
    for (int i = 0; i < n; ++i) v[i] = rhs[i] * inv;
  }
  int imax = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  if (v[imax] < 0.0)
    for (double& x : v) x = -x;
  return v;
}

double gershgorin_lower_bound(const SparseSym& A, std::span<const double> m) {
  double lb = std::numeric_limits<double>::infinity();
  for (int r = 0; r < A.n; ++r) {
    double diag = 0.0, radius = 0.0;
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
      if (A.col[k] == r)
        diag = A.val[k];
      else
        radius += std::abs(A.val[k]);
    }
    lb = std::min(lb, (diag - radius) / m[r]);
  }
  return lb;
}

double operator_scale(const SparseSym& A, std::span<const double> m) {
  double sc = 0.0;
  for (int r = 0; r < A.n; ++r) {
    double row = 0.0;
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) row += std::abs(A.val[k]);
    sc = std::max(sc, row / m[r]);
  }
  return sc;
}

std::vector<double> simpson_weights(int n, double h) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("simpson_weights: n must be even and >= 2");
  std::vector<double> w(n + 1, 0.0);
  w[0] = w[n] = h / 3.0;
  for (int i = 1; i < n; ++i) w[i] = (i % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
  return w;
}

}  // namespace stripheat::kern
