#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stripheat/analytic_oracle.hpp"
#include "stripheat/transverse.hpp"

using namespace stripheat;

namespace {
constexpr double kPi = std::numbers::pi;

Field tensor_field(const Discretization& disc, double sigma_sq, int mode) {
  return nodal_field(disc, [&](double x1, double x2) {
    return std::exp(-x1 * x1 / (2.0 * sigma_sq)) *
           eigenfunction_dn(mode, disc.config.a, x2);
  });
}
}  // namespace

TEST_CASE("gaussian kernel: diagonal value, symmetry, unit mass") {
  const double t = 0.37;
  CHECK(gauss_kernel(1.2, 1.2, t) ==
        doctest::Approx(1.0 / std::sqrt(4.0 * kPi * t)).epsilon(1e-14));
  CHECK(gauss_kernel(0.3, -0.8, t) ==
        doctest::Approx(gauss_kernel(-0.8, 0.3, t)).epsilon(1e-15));
  const int nq = 4000;
  const double R = 12.0;
  const auto w = kern::simpson_weights(nq, 2.0 * R / nq);
  double s = 0.0;
  for (int i = 0; i <= nq; ++i) s += w[i] * gauss_kernel(-R + 2.0 * R * i / nq, 0.1, t);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("strip kernel is symmetric and clamps at the Dirichlet wall") {
  const StripKernelSpec spec{1.0, 0.8, 8};
  const double k1 = strip_kernel(0.3, 0.2, -0.4, 0.6, spec);
  const double k2 = strip_kernel(-0.4, 0.6, 0.3, 0.2, spec);
  CHECK(k1 == doctest::Approx(k2).epsilon(1e-13));
  CHECK(std::abs(strip_kernel(0.3, -1.0, -0.4, 0.6, spec)) <= 1e-14);
}

TEST_CASE("mode-sum truncation bound shrinks with time") {
  StripKernelSpec spec{1.0, 1.0, 8};
  const double b1 = truncation_bound(spec);
  spec.t = 4.0;
  const double b4 = truncation_bound(spec);
  CHECK(b4 < b1);
  CHECK(b4 < 1e-12);
  spec.t = 1e-4;
  CHECK(truncation_bound(spec) > 1.0);  // collapses for short times
}

TEST_CASE("pure transverse modes stay pure and decay at the mode rate") {
  const Discretization disc({1.0, Theta::Untwisted}, Grid2D(20.0, 1.0, 400, 40));
  const Field u0 = tensor_field(disc, 1.0, 1);
  const double t = 1.0;
  const Field ut = apply_semigroup_untwisted(u0, t);
  CHECK(ut.t == doctest::Approx(1.0));

  // norm follows the closed 1D factor: ||e^{-x^2/2} * p_t||^2 = sqrt(pi/(1+2t))
  const double expect = std::pow(kPi, 0.25) * std::pow(1.0 + 2.0 * t, -0.25);
  CHECK(field_norm(ut) == doctest::Approx(expect).epsilon(1e-5));

  // second mode: extra decay e^{(E1 - E2) t} = e^{-8 E1 t}
  const Field v0 = tensor_field(disc, 1.0, 2);
  const Field vt = apply_semigroup_untwisted(v0, t);
  const double extra = std::exp(-8.0 * eigenvalue_dn(1, 1.0) * t);
  CHECK(field_norm(vt) == doctest::Approx(expect * extra).epsilon(1e-4));
}

TEST_CASE("oracle application is a contraction and composes over time") {
  const Discretization disc({1.0, Theta::Untwisted}, Grid2D(20.0, 1.0, 400, 40));
  const Field u0 = nodal_field(disc, [](double x1, double x2) {
    return std::exp(-x1 * x1 / 2.0) * std::cos(kPi * x2 / 2.0);
  });
  const Field u1 = apply_semigroup_untwisted(u0, 0.5);
  CHECK(field_norm(u1) < field_norm(u0));
  const Field u2a = apply_semigroup_untwisted(u1, 0.5);
  const Field u2b = apply_semigroup_untwisted(u0, 1.0);
  double diff2 = 0.0, ref2 = 0.0;
  for (std::size_t k = 0; k < u2a.v.size(); ++k) {
    const double d = u2a.v[k] - u2b.v[k];
    diff2 += disc.dofs.mass[k] * d * d;
    ref2 += disc.dofs.mass[k] * u2b.v[k] * u2b.v[k];
  }
  CHECK(std::sqrt(diff2 / ref2) <= 3e-5);
}

TEST_CASE("oracle requires the layout it encodes") {
  const Discretization twisted({1.0, Theta::Twisted}, Grid2D(10.0, 1.0, 100, 40));
  const Field u0 = nodal_field(twisted, [](double x1, double) {
    return std::exp(-x1 * x1);
  });
  CHECK_THROWS_AS(apply_semigroup_untwisted(u0, 1.0), std::invalid_argument);
}

TEST_CASE("closed-form norm curve: frozen values and limits") {
  // frozen by an independent symbolic evaluation of
  // t^{-1/4} (1 + 1/t + sqrt(1 + 2/t))^{-1/4}
  CHECK(std::abs(norm_S0_exact(1.0) - 0.719470701422) <= 1e-10);
  CHECK(std::abs(norm_S0_exact(4.0) - 0.563770560774) <= 1e-10);
  CHECK(std::abs(norm_S0_exact(16.0) - 0.414213562373) <= 1e-10);
  CHECK(std::abs(norm_S0_exact(64.0) - 0.296156034964) <= 1e-10);
  CHECK(std::abs(norm_S0_exact(128.0) - 0.249515026198) <= 1e-10);
  // long-time behavior: t^{1/4} norm rises to 2^{-1/4}; the bracket above
  // decreases to 2, so the approach is from below with gap ~ c/(4t)
  const double c = std::pow(2.0, -0.25);
  CHECK(std::pow(1e6, 0.25) * norm_S0_exact(1e6) ==
        doctest::Approx(c).epsilon(1e-5));
  const double scaled64 = std::pow(64.0, 0.25) * norm_S0_exact(64.0);
  CHECK(scaled64 < c);
  CHECK(c - scaled64 <= 1.1 * c / (4.0 * 64.0));
  CHECK(scaled64 > std::pow(8.0, 0.25) * norm_S0_exact(8.0));
}

TEST_CASE("quadrature power iteration reproduces the closed form") {
  for (double t : {1.0, 4.0, 16.0}) {
    const OracleNorm r = norm_S0_oracle(t, 1.0);
    REQUIRE(r.converged);
    CHECK(std::abs(r.value - norm_S0_exact(t)) <= 1e-10);
    CHECK(r.mode_tail <= std::exp(-2.0 * t * 8.0 * eigenvalue_dn(1, 1.0)) * 1.001);
  }
  CHECK_THROWS_AS(norm_S0_oracle(0.5, 1.0), std::invalid_argument);
}
