#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "stripheat/operators.hpp"

using namespace stripheat;

namespace {

double quad_form(const kern::SparseSym& A, const std::vector<double>& v) {
  std::vector<double> y(A.n);
  kern::spmv_serial(A, v.data(), y.data());
  return kern::dot_serial(v, y);
}

// tensor vector g(y1) * (discrete transverse ground) on an untwisted grid
std::vector<double> tensor_ground(const Discretization& disc,
                                  const std::vector<double>& ground) {
  std::vector<double> v(disc.dofs.n_dofs);
  for (int d = 0; d < disc.dofs.n_dofs; ++d) {
    const auto [i, j] = disc.dofs.dof_to_node[d];
    const double y1 = disc.grid.x1(i);
    v[d] = std::exp(-y1 * y1 / 8.0) * ground[j - 1];
  }
  return v;
}

}  // namespace

TEST_CASE("assembled matrices are exactly symmetric") {
  const Discretization disc({1.0, Theta::Twisted}, Grid2D(6.0, 1.0, 60, 12));
  const SymmetricForm form = assemble_physical(disc);
  const auto& A = form.A;
  for (int r = 0; r < A.n; ++r)
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
      const int c = A.col[k];
      bool found = false;
      for (int k2 = A.row_ptr[c]; k2 < A.row_ptr[c + 1]; ++k2)
        if (A.col[k2] == r) {
          CHECK(A.val[k2] == A.val[k]);
          found = true;
        }
      CHECK(found);
    }
}

TEST_CASE("the shifted physical form is nonnegative") {
  for (Theta th : {Theta::Untwisted, Theta::Twisted}) {
    const Discretization disc({1.0, th}, Grid2D(6.0, 1.0, 60, 12));
    const SymmetricForm form = assemble_physical(disc);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double scale = kern::operator_scale(form.A, form.mass);
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<double> v(form.dim());
      for (auto& x : v) x = u(rng);
      CHECK(quad_form(form.A, v) >= -1e-12 * scale * kern::dot_serial(v, v));
    }
  }
}

TEST_CASE("physical descriptor carries the layout") {
  const Discretization disc({1.0, Theta::Twisted}, Grid2D(6.0, 1.0, 60, 12));
  const SymmetricForm form = assemble_physical(disc);
  CHECK(form.desc.kind == FormKind::Physical);
  CHECK(form.desc.theta == Theta::Twisted);
  CHECK(form.desc.n1 == 60);
  CHECK(form.desc.e1h > 0.0);
  CHECK(form.desc.grid_id() ==
        assemble_physical(disc).desc.grid_id());  // deterministic
  const Discretization disc2({1.0, Theta::Twisted}, Grid2D(6.0, 1.0, 80, 12));
  CHECK(form.desc.grid_id() != assemble_physical(disc2).desc.grid_id());
}

TEST_CASE("family values decompose as base plus scaled part") {
  const SelfSimilarFamily fam({1.0, Theta::Twisted}, {8.0, 200, 12});
  const SymmetricForm f3 = fam.form_at(3.0);
  const double es = std::exp(3.0);
  const auto base = fam.val_base();
  const auto sc = fam.val_scale();
  REQUIRE(base.size() == f3.A.val.size());
  for (std::size_t k = 0; k < base.size(); ++k)
    CHECK(f3.A.val[k] == base[k] + es * sc[k]);
  // shared sparsity with the pattern
  CHECK(f3.A.col == fam.pattern().col);
  CHECK(f3.A.row_ptr == fam.pattern().row_ptr);
}

TEST_CASE("one-shot assembly matches the family") {
  const SsGridSpec spec{8.0, 200, 12};
  const StripConfig cfg{1.0, Theta::Twisted};
  const SymmetricForm a = assemble_selfsimilar(cfg, spec, 2.5);
  const SymmetricForm b = SelfSimilarFamily(cfg, spec).form_at(2.5);
  REQUIRE(a.A.val.size() == b.A.val.size());
  for (std::size_t k = 0; k < a.A.val.size(); ++k) CHECK(a.A.val[k] == b.A.val[k]);
  CHECK(a.desc.e1h == b.desc.e1h);
}

TEST_CASE("scaled block is nonnegative, so the form grows with s") {
  const SelfSimilarFamily fam({1.0, Theta::Twisted}, {8.0, 200, 12});
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(fam.form_at(0.0).dim());
  for (auto& x : v) x = u(rng);
  const double r0 = fam.rayleigh(0.0, v);
  const double r2 = fam.rayleigh(2.0, v);
  const double r5 = fam.rayleigh(5.0, v);
  CHECK(r2 >= r0 - 1e-12 * std::abs(r0));
  CHECK(r5 >= r2 - 1e-12 * std::abs(r2));
}

TEST_CASE("transverse ground tensors make the scaled block vanish") {
  // on such vectors the quotient must not move with s even though the scaled
  // entries grow by e^12.  The floor is set by the stored shift: it is the
  // transverse quotient rounded to double, so the cancellation leaves ~1 ulp
  // of it, amplified by e^s.  Observed ~2e-11 at s=12; allow 3x headroom.
  const SelfSimilarFamily fam({1.0, Theta::Untwisted}, {12.0, 400, 20});
  const auto tr = discrete_transverse(1.0, 20, Orientation::DN);
  const std::vector<double> v = tensor_ground(fam.disc(), tr.ground);
  const double r0 = fam.rayleigh(0.0, v);
  for (double s : {2.0, 6.0, 12.0})
    CHECK(std::abs(fam.rayleigh(s, v) - r0) <= 4e-16 * std::exp(s) + 1e-13);
  // and the quotient is the longitudinal oscillator energy: above its floor
  const auto ho = harmonic_eigenvalues({12.0, 400, false}, 1);
  CHECK(r0 >= ho[0] - 1e-10);
  CHECK(r0 <= 0.26);  // near the ground since g is the analytic profile
}

TEST_CASE("conditioning guard flags extreme scale separation") {
  const SelfSimilarFamily fam({1.0, Theta::Twisted}, {8.0, 100, 40});
  CHECK(fam.form_at(12.0).desc.warning.empty());
  CHECK_FALSE(fam.form_at(30.0).desc.warning.empty());
}

TEST_CASE("oscillator levels sit at quarter-integers") {
  const auto ev = harmonic_eigenvalues({12.0, 1200, false}, 3);
  CHECK(std::abs(ev[0] - 0.25) <= 1e-4);
  CHECK(std::abs(ev[1] - 0.75) <= 1e-4);
  CHECK(std::abs(ev[2] - 1.25) <= 1e-4);
  const auto evd = harmonic_eigenvalues({12.0, 1200, true}, 1);
  CHECK(std::abs(evd[0] - 0.75) <= 1e-4);
  // odd modes vanish at 0, so the clamped problem inherits them exactly
  CHECK(std::abs(evd[0] - ev[1]) <= 1e-12);
}

TEST_CASE("oscillator matrix agrees with its tridiagonal twin") {
  const HarmonicOscillator1D ho{10.0, 300, false};
  const SymmetricForm form = assemble_harmonic(ho);
  const kern::Tridiag T = harmonic_tridiag(ho);
  REQUIRE(form.dim() == T.n());
  const double lam = kern::tridiag_eigenvalue(T, 0);
  // quadratic form of the tridiagonal ground vector through the CSR matrix
  const std::vector<double> v = kern::tridiag_eigenvector(T, lam);
  const double q = quad_form(form.A, v);
  double m2 = 0.0;
  for (int i = 0; i < T.n(); ++i) m2 += form.mass[i] * v[i] * v[i];
  CHECK(q / m2 == doctest::Approx(lam).epsilon(1e-11));
}

TEST_CASE("dirichlet-at-zero removal needs a node at zero") {
  CHECK_THROWS_AS(assemble_harmonic({10.0, 301, true}), std::invalid_argument);
}

TEST_CASE("family rejects invalid shapes") {
  CHECK_THROWS_AS(SelfSimilarFamily({1.0, Theta::Twisted}, {8.0, 201, 12}),
                  std::invalid_argument);  // odd n1
  CHECK_THROWS_AS(assemble_selfsimilar({1.0, Theta::Twisted}, {8.0, 200, 12}, -1.0),
                  std::invalid_argument);  // negative s
}
