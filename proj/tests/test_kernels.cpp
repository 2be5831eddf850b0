#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "stripheat/kernels.hpp"

using namespace stripheat::kern;

namespace {

SparseSym random_sym(int n, int band, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TripletBuffer buf(n);
  for (int i = 0; i < n; ++i) {
    buf.add(i, i, 4.0 + band + u(rng));
    for (int k = 1; k <= band; ++k)
      if (i + k < n) buf.add_edge(i, i + k, 0.25 * u(rng) + 0.5);
  }
  return buf.finalize();
}

Tridiag laplacian_1d(int n, double mass) {
  Tridiag T;
  T.diag.assign(n, 2.0);
  T.off.assign(n - 1, -1.0);
  T.mass.assign(n, mass);
  return T;
}

}  // namespace

TEST_CASE("compensated sum survives catastrophic cancellation") {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);
}

TEST_CASE("triplet buffer merges duplicates and sorts columns") {
  TripletBuffer buf(3);
  buf.add(1, 0, 2.0);
  buf.add(0, 0, 1.0);
  buf.add(0, 1, 2.0);
  buf.add(0, 0, 0.5);  // duplicate
  buf.add(1, 1, 3.0);
  const SparseSym A = buf.finalize();
  REQUIRE(A.n == 3);
  CHECK(A.row_ptr[0] == 0);
  CHECK(A.row_ptr[1] == 2);  // (0,0) merged + (0,1)
  CHECK(A.val[0] == 1.5);
  CHECK(A.col[0] == 0);
  CHECK(A.col[1] == 1);
  for (int r = 0; r < A.n; ++r)
    for (int k = A.row_ptr[r] + 1; k < A.row_ptr[r + 1]; ++k)
      CHECK(A.col[k] > A.col[k - 1]);
}

TEST_CASE("add_edge produces a symmetric positive semidefinite stencil") {
  TripletBuffer buf(2);
  buf.add_edge(0, 1, 3.0);
  const SparseSym A = buf.finalize();
  // quadratic form equals 3 (x0 - x1)^2
  const double x[2] = {2.0, -1.0};
  double y[2];
  spmv_serial(A, x, y);
  CHECK(x[0] * y[0] + x[1] * y[1] == doctest::Approx(3.0 * 9.0).epsilon(1e-15));
}

TEST_CASE("parallel spmv and dot are bit-identical to serial") {
  std::mt19937 rng(12345);
  const SparseSym A = random_sym(20000, 5, rng);
  std::vector<double> x(A.n), y1(A.n), y2(A.n);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : x) v = u(rng);
  spmv(A, x.data(), y1.data());
  spmv_serial(A, x.data(), y2.data());
  for (int i = 0; i < A.n; ++i) REQUIRE(y1[i] == y2[i]);
  CHECK(dot(x, y1) == dot_serial(x, y2));
  // repeated evaluation is identical too
  CHECK(dot(x, y1) == dot(x, y1));
}

TEST_CASE("dot_weighted matches the composed products") {
  std::vector<double> x{1.0, 2.0, -3.0}, m{0.5, 1.5, 2.0}, y{4.0, -1.0, 0.25};
  CHECK(dot_weighted(x, m, y) ==
        doctest::Approx(1 * 0.5 * 4 + 2 * 1.5 * (-1) + (-3) * 2 * 0.25)
            .epsilon(1e-15));
}

TEST_CASE("band cholesky solves the path-graph system exactly") {
  // tridiag(-1, 2, -1), rhs e_1: solution x_i = (n + 1 - i) / (n + 1), 1-based
  const int n = 5;
  TripletBuffer buf(n);
  for (int i = 0; i < n; ++i) buf.add(i, i, 2.0);
  for (int i = 0; i + 1 < n; ++i) {
    buf.add(i, i + 1, -1.0);
    buf.add(i + 1, i, -1.0);
  }
  const SparseSym A = buf.finalize();
  CHECK(bandwidth(A) == 1);
  std::vector<double> zero(n, 0.0);
  BandMatrix B = band_from_csr(A, zero);
  REQUIRE(band_cholesky(B));
  std::vector<double> x(n, 0.0);
  x[0] = 1.0;
  band_solve(B, x);
  for (int i = 0; i < n; ++i)
    CHECK(x[i] == doctest::Approx((n - i) / double(n + 1)).epsilon(1e-14));
}

TEST_CASE("band_from_csr applies the scale and the diagonal shift") {
  std::mt19937 rng(99);
  const SparseSym A = random_sym(400, 3, rng);
  std::vector<double> m(A.n);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (auto& v : m) v = u(rng);

  BandMatrix B = band_from_csr(A, m, 0.5);  // 0.5 A + diag(m)
  REQUIRE(band_cholesky(B));
  std::vector<double> b(A.n);
  for (auto& v : b) v = u(rng) - 1.2;
  std::vector<double> x = b;
  band_solve(B, x);
  // residual of (0.5 A + M) x = b
  std::vector<double> Ax(A.n);
  spmv_serial(A, x.data(), Ax.data());
  double worst = 0.0;
  for (int i = 0; i < A.n; ++i)
    worst = std::max(worst, std::abs(0.5 * Ax[i] + m[i] * x[i] - b[i]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("cholesky reports indefinite matrices") {
  TripletBuffer buf(2);
  buf.add(0, 0, 1.0);
  buf.add(1, 1, -1.0);
  BandMatrix B = band_from_csr(buf.finalize(), std::vector<double>(2, 0.0));
  CHECK_FALSE(band_cholesky(B));
}

TEST_CASE("sturm bisection reproduces the path-graph spectrum") {
  const int n = 8;
  const Tridiag T = laplacian_1d(n, 1.0);
  for (int k = 0; k < n; ++k) {
    const double exact =
        2.0 - 2.0 * std::cos((k + 1) * std::numbers::pi / (n + 1));
    CHECK(tridiag_eigenvalue(T, k) == doctest::Approx(exact).epsilon(1e-13));
  }
  CHECK(sturm_count(T, 0.0) == 0);
  CHECK(sturm_count(T, 5.0) == n);
}

TEST_CASE("uniform mass scales the pencil eigenvalues") {
  const Tridiag T1 = laplacian_1d(12, 1.0);
  const Tridiag T2 = laplacian_1d(12, 2.0);
  CHECK(tridiag_eigenvalue(T2, 0) ==
        doctest::Approx(0.5 * tridiag_eigenvalue(T1, 0)).epsilon(1e-13));
}

TEST_CASE("tridiag eigenvector: small residual, mass-normalized, sign fixed") {
  Tridiag T = laplacian_1d(30, 1.0);
  for (int i = 0; i < T.n(); ++i) T.mass[i] = 1.0 + 0.01 * i;
  const double lam = tridiag_eigenvalue(T, 0);
  const std::vector<double> v = tridiag_eigenvector(T, lam);
  double nrm2 = 0.0, res = 0.0, vmax = 0.0;
  for (int i = 0; i < T.n(); ++i) {
    nrm2 += T.mass[i] * v[i] * v[i];
    double r = T.diag[i] * v[i] - lam * T.mass[i] * v[i];
    if (i > 0) r += T.off[i - 1] * v[i - 1];
    if (i + 1 < T.n()) r += T.off[i] * v[i + 1];
    res = std::max(res, std::abs(r));
    vmax = std::max(vmax, std::abs(v[i]));
  }
  CHECK(nrm2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res <= 1e-10);
  // largest component positive
  for (double x : v) vmax = std::max(vmax, x);
  CHECK(*std::max_element(v.begin(), v.end()) == vmax);
}

TEST_CASE("gershgorin bound sits below the smallest pencil eigenvalue") {
  std::mt19937 rng(7);
  const SparseSym A = random_sym(300, 2, rng);
  std::vector<double> m(A.n, 1.0);
  const double lb = gershgorin_lower_bound(A, m);
  // power-free check: quadratic form of random unit vectors stays above lb
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> x(A.n), y(A.n);
    for (auto& v : x) v = u(rng);
    spmv_serial(A, x.data(), y.data());
    CHECK(dot_serial(x, y) >= lb * dot_serial(x, x) - 1e-12);
  }
}

TEST_CASE("operator_scale is the mass-scaled infinity norm") {
  TripletBuffer buf(2);
  buf.add(0, 0, 3.0);
  buf.add(0, 1, -2.0);
  buf.add(1, 0, -2.0);
  buf.add(1, 1, 1.0);
  const SparseSym A = buf.finalize();
  std::vector<double> m{1.0, 0.5};
  CHECK(operator_scale(A, m) == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("simpson weights integrate cubics exactly") {
  const int n = 10;
  const double h = 0.1;
  const auto w = simpson_weights(n, h);
  REQUIRE(static_cast<int>(w.size()) == n + 1);
  double s3 = 0.0, s0 = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = i * h;
    s3 += w[i] * x * x * x;
    s0 += w[i];
  }
  CHECK(s0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s3 == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("axpy and scale") {
  std::vector<double> x{1.0, 2.0}, y{10.0, 20.0};
  axpy(2.0, x, y);
  CHECK(y[0] == 12.0);
  CHECK(y[1] == 24.0);
  scale(0.5, y);
  CHECK(y[0] == 6.0);
  CHECK(y[1] == 12.0);
}
