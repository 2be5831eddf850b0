#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "stripheat/csv.hpp"
#include "stripheat/decay.hpp"

using namespace stripheat;

namespace {

std::vector<double> times() {
  std::vector<double> t;
  for (int k = 0; k <= 16; ++k) t.push_back(std::pow(2.0, 0.5 * k));
  return t;
}

std::vector<double> power_law(const std::vector<double>& t, double c, double g) {
  std::vector<double> v;
  for (double x : t) v.push_back(c * std::pow(1.0 + x, -g));
  return v;
}

NormTrace trace_of(const std::vector<double>& t, const std::vector<double>& v,
                   Theta th) {
  NormTrace tr;
  tr.t = t;
  tr.norm = v;
  tr.theta = th;
  tr.grid_id = "synthetic";
  return tr;
}

PositivityReport fake_pos(Theta th, double c_h) {
  PositivityReport p;
  p.theta = th;
  p.c_h = c_h;
  p.floor = 0.2499;
  p.min_margin = 0.01;
  p.is_flat_like = th == Theta::Untwisted;
  p.ok = true;
  return p;
}

std::vector<SemigroupNormEstimate> fake_norms(const std::vector<double>& t,
                                              double g) {
  std::vector<SemigroupNormEstimate> out;
  for (double x : t) {
    SemigroupNormEstimate e;
    e.t = x;
    e.estimate = std::pow(1.0 + x, -g);
    e.residual = 1e-6;
    e.iterations = 5;
    e.converged = true;
    e.grid_id = "synthetic";
    out.push_back(e);
  }
  return out;
}

TheoremInputs good_inputs() {
  const auto t = times();
  TheoremInputs in;
  in.fit_untwisted = fit_rate(t, power_law(t, 0.84, 0.25), 10.0, 128.0);
  in.fit_twisted = fit_rate(t, power_law(t, 1.0, 0.75), 10.0, 128.0);
  in.ratio_fit =
      rate_ratio_test(trace_of(t, power_law(t, 1.0, 0.75), Theta::Twisted),
                      trace_of(t, power_law(t, 1.0, 0.25), Theta::Untwisted),
                      10.0, 128.0)
          .fit;
  in.pos_untwisted = fake_pos(Theta::Untwisted, 2e-5);
  in.pos_twisted = fake_pos(Theta::Twisted, 0.25);
  in.norms_untwisted = fake_norms(t, 0.25);
  in.norms_twisted = fake_norms(t, 0.75);
  return in;
}

}  // namespace

TEST_CASE("exact power laws are recovered exactly") {
  const auto t = times();
  const DecayFit fit = fit_rate(t, power_law(t, 1.7, 0.75), 1.0, 300.0);
  CHECK(fit.gamma == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(std::exp(fit.log_c) == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(fit.rms_log_residual <= 1e-13);
  CHECK(fit.n_used == 17);
}

TEST_CASE("fit is equivariant under amplitude scaling") {
  const auto t = times();
  const auto v = power_law(t, 1.0, 0.4);
  auto v2 = v;
  for (auto& x : v2) x *= 37.0;
  const DecayFit f1 = fit_rate(t, v, 2.0, 256.0);
  const DecayFit f2 = fit_rate(t, v2, 2.0, 256.0);
  CHECK(f2.gamma == doctest::Approx(f1.gamma).epsilon(1e-13));
  CHECK(f2.log_c - f1.log_c == doctest::Approx(std::log(37.0)).epsilon(1e-12));
}

TEST_CASE("fit refuses unusable windows and data") {
  const auto t = times();
  auto v = power_law(t, 1.0, 0.5);
  CHECK_THROWS_AS(fit_rate(t, v, 100.0, 120.0), std::invalid_argument);  // too few
  v[8] = 0.0;
  CHECK_THROWS_AS(fit_rate(t, v, 1.0, 300.0), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate(t, power_law(t, 1.0, 0.5), 5.0, 5.0),
                  std::invalid_argument);
}

TEST_CASE("noise shows up in the residual, not a silent bias") {
  const auto t = times();
  auto v = power_law(t, 1.0, 0.5);
  std::mt19937 rng(5);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (auto& x : v) x *= std::exp(noise(rng));
  const DecayFit fit = fit_rate(t, v, 1.0, 300.0);
  CHECK(std::abs(fit.gamma - 0.5) <= 0.03);
  CHECK(fit.rms_log_residual >= 1e-3);
}

TEST_CASE("curve integral bound: constant rate gives a pure exponential") {
  const std::vector<double> s{0.0, 1.0, 2.5, 4.0, 6.0};
  const std::vector<double> mu(5, 0.63);
  for (double se : {0.0, 0.7, 2.5, 5.9})
    CHECK(exponential_bound_from_mu(s, mu, se) ==
          doctest::Approx(std::exp(-0.63 * se)).epsilon(1e-14));
}

TEST_CASE("curve integral bound: linear rate integrates the trapezoid") {
  // mu(s) = s/2 on [0, 4]: integral to 4 is 4
  const std::vector<double> s{0.0, 2.0, 4.0};
  const std::vector<double> mu{0.0, 1.0, 2.0};
  CHECK(exponential_bound_from_mu(s, mu, 4.0) ==
        doctest::Approx(std::exp(-4.0)).epsilon(1e-14));
  CHECK(exponential_bound_from_mu(s, mu, 1.0) ==
        doctest::Approx(std::exp(-0.25)).epsilon(1e-14));  // partial cell
}

TEST_CASE("curve integral bound rejects gaps in coverage") {
  const std::vector<double> mu{0.5, 0.5};
  CHECK_THROWS_AS(exponential_bound_from_mu(std::vector<double>{0.5, 1.0}, mu, 1.0),
                  std::invalid_argument);  // does not start at 0
  CHECK_THROWS_AS(exponential_bound_from_mu(std::vector<double>{0.0, 1.0}, mu, 2.0),
                  std::invalid_argument);  // beyond the last sample
}

TEST_CASE("ratio of two synthetic traces recovers the exponent gap") {
  const auto t = times();
  const RatioFit rf =
      rate_ratio_test(trace_of(t, power_law(t, 0.8, 0.75), Theta::Twisted),
                      trace_of(t, power_law(t, 1.3, 0.25), Theta::Untwisted),
                      1.0, 300.0);
  CHECK(rf.fit.gamma == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(rf.ratio.size() == t.size());
  // first sample is t=1: ratio = (0.8/1.3) * (1+1)^{-(0.75-0.25)}
  CHECK(rf.ratio[0] == doctest::Approx(0.8 / 1.3 * std::pow(2.0, -0.5)).epsilon(1e-12));
}

TEST_CASE("ratio test demands matching time samples") {
  const auto t = times();
  auto t2 = t;
  t2[3] += 0.5;
  const auto v = power_law(t, 1.0, 0.5);
  CHECK_THROWS_AS(rate_ratio_test(trace_of(t, v, Theta::Twisted),
                                  trace_of(t2, v, Theta::Untwisted), 1.0, 300.0),
                  std::invalid_argument);
  auto t3 = t;
  t3.pop_back();
  auto v3 = v;
  v3.pop_back();
  CHECK_THROWS_AS(rate_ratio_test(trace_of(t3, v3, Theta::Twisted),
                                  trace_of(t, v, Theta::Untwisted), 1.0, 300.0),
                  std::invalid_argument);
}

TEST_CASE("summary report passes on consistent inputs") {
  const TheoremReport rep = theorem_report(good_inputs());
  CHECK(rep.ok);
  REQUIRE(rep.checks.size() == 4);
  for (const auto& c : rep.checks) {
    CHECK(c.pass);
    CHECK(c.margin >= 0.0);
  }
  CHECK(rep.gamma0 == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(rep.ratio_exponent == doctest::Approx(0.5).epsilon(1e-10));
  const std::string text = rep.render_text();
  CHECK(text.find("all checks passed") != std::string::npos);
  const std::string kv = rep.render_kv();
  CHECK(kv.find("ok=1") != std::string::npos);
  CHECK(kv.find("check.norm-bound=pass") != std::string::npos);
}

TEST_CASE("summary report flags a wrong untwisted rate") {
  TheoremInputs in = good_inputs();
  const auto t = times();
  in.fit_untwisted = fit_rate(t, power_law(t, 1.0, 0.35), 10.0, 128.0);
  const TheoremReport rep = theorem_report(in);
  CHECK_FALSE(rep.ok);
  CHECK_FALSE(rep.checks[0].pass);
  CHECK(rep.checks[0].margin < 0.0);
  CHECK(rep.checks[1].pass);  // others unaffected
  CHECK(rep.render_text().find("CHECKS FAILED") != std::string::npos);
}

TEST_CASE("summary report flags a violated norm bound") {
  TheoremInputs in = good_inputs();
  in.norms_twisted = fake_norms(times(), 0.35);  // too slow for c_pi = 0.25
  const TheoremReport rep = theorem_report(in);
  CHECK_FALSE(rep.ok);
  bool found = false;
  for (const auto& c : rep.checks)
    if (c.name == "norm-bound") {
      CHECK_FALSE(c.pass);
      found = true;
    }
  CHECK(found);
}

TEST_CASE("summary report lists what is missing") {
  TheoremInputs in = good_inputs();
  in.norms_twisted.clear();
  in.pos_untwisted.floor = 0.0;
  try {
    theorem_report(in);
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK(what.find("twisted norm samples") != std::string::npos);
    CHECK(what.find("untwisted spectral curve") != std::string::npos);
  }
}

TEST_CASE("fnv1a matches the published test vectors") {
  CHECK(csv::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(csv::fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(csv::fnv1a_hex("foobar") == "85944171f73967e8");
  CHECK(csv::fnv1a_hex("x") != csv::fnv1a_hex("y"));
}

TEST_CASE("double formatting round trips bit for bit") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 200; ++k) {
    const double x = (k % 3 == 0) ? u(rng) * 1e-150 : u(rng);
    CHECK(std::strtod(csv::fmt_double(x).c_str(), nullptr) == x);
  }
  CHECK(csv::fmt_double(0.1) == "0.10000000000000001");
  CHECK(csv::fmt_int(-42) == "-42");
}

TEST_CASE("csv writer: header, provenance, width discipline") {
  const std::string path = "/tmp/stripheat_test_writer.csv";
  {
    const std::vector<std::string> cols{"t", "value"};
    csv::Writer w(path, cols, "cmd=test config_hash=deadbeef");
    w.row_values(std::vector<double>{1.0, 0.5});
    const std::vector<std::string> bad{"only-one"};
    CHECK_THROWS_AS(w.row(bad), std::invalid_argument);
  }
  std::ifstream in(path);
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  CHECK(l1 == "# stripheat 0.1.0 cmd=test config_hash=deadbeef");
  CHECK(l2 == "t,value");
  CHECK(l3 == "1,0.5");
  std::remove(path.c_str());
}
