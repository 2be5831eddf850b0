#include "stripheat/decay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace stripheat {

DecayFit fit_rate(std::span<const double> t, std::span<const double> v,
                  double t_lo, double t_hi) {
  if (t.size() != v.size())
    throw std::invalid_argument("fit_rate: t and v length mismatch");
  if (!(t_lo < t_hi)) throw std::invalid_argument("fit_rate: empty window");

  // x = log(1+t), y = log v; minimize ||y - (log_c - gamma x)||
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_lo || t[k] > t_hi) continue;
    if (!(v[k] > 0.0))
      throw std::invalid_argument("fit_rate: nonpositive value inside the fit window");
    xs.push_back(std::log1p(t[k]));
    ys.push_back(std::log(v[k]));
  }
  const int n = static_cast<int>(xs.size());
  if (n < 8)
    throw std::invalid_argument("fit_rate: need at least 8 samples in the window");

  double sx = 0, sy = 0;
  for (int k = 0; k < n; ++k) {
    sx += xs[k];
    sy += ys[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (int k = 0; k < n; ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_rate: degenerate abscissae");

  DecayFit fit;
  fit.gamma = -sxy / sxx;
  fit.log_c = my + fit.gamma * mx;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.n_used = n;
  double rss = 0;
  for (int k = 0; k < n; ++k) {
    const double r = ys[k] - (fit.log_c - fit.gamma * xs[k]);
    rss += r * r;
  }
  fit.rms_log_residual = std::sqrt(rss / n);
  return fit;
}

double exponential_bound_from_mu(std::span<const double> s,
                                 std::span<const double> mu, double s_eval) {
  if (s.size() != mu.size() || s.size() < 2)
    throw std::invalid_argument("exponential_bound_from_mu: need matching samples");
  for (std::size_t k = 1; k < s.size(); ++k)
    if (!(s[k] > s[k - 1]))
      throw std::invalid_argument("exponential_bound_from_mu: s not increasing");
  if (std::abs(s.front()) > 1e-12 || s_eval < 0.0 || s_eval > s.back() + 1e-12)
    throw std::invalid_argument(
        "exponential_bound_from_mu: samples must cover [0, s_eval]");

  kern::CompensatedSum integral;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double lo = s[k - 1];
    if (lo >= s_eval) break;
    const double hi = std::min(s[k], s_eval);
    // linear interpolation of mu on the partial cell
    const double f = (s[k] > s[k - 1]) ? (hi - s[k - 1]) / (s[k] - s[k - 1]) : 0.0;
    const double mu_hi = mu[k - 1] + f * (mu[k] - mu[k - 1]);
    integral.add(0.5 * (mu[k - 1] + mu_hi) * (hi - lo));
  }
  return std::exp(-integral.value());
}

RatioFit rate_ratio_test(const NormTrace& twisted, const NormTrace& untwisted,
                         double t_lo, double t_hi) {
  if (twisted.t.size() != untwisted.t.size())
    throw std::invalid_argument("rate_ratio_test: traces have different lengths");
  RatioFit out;
  for (std::size_t k = 0; k < twisted.t.size(); ++k) {
    const double tt = twisted.t[k];
    if (std::abs(tt - untwisted.t[k]) > 1e-9 * std::max(1.0, tt))
      throw std::invalid_argument("rate_ratio_test: time samples do not match");
    if (!(untwisted.norm[k] > 0.0))
      throw std::invalid_argument("rate_ratio_test: untwisted trace vanished");
    out.t.push_back(tt);
    out.ratio.push_back(twisted.norm[k] / untwisted.norm[k]);
  }
  out.fit = fit_rate(out.t, out.ratio, t_lo, t_hi);
  return out;
}

namespace {

double band_margin(double x, double lo, double hi) {
  return std::min(x - lo, hi - x);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

TheoremReport theorem_report(const TheoremInputs& in) {
  std::vector<std::string> missing;
  if (in.fit_untwisted.n_used == 0) missing.push_back("untwisted rate fit");
  if (in.fit_twisted.n_used == 0) missing.push_back("twisted rate fit");
  if (in.ratio_fit.n_used == 0) missing.push_back("ratio fit");
  if (in.pos_untwisted.theta != Theta::Untwisted || in.pos_untwisted.floor == 0.0)
    missing.push_back("untwisted spectral curve");
  if (in.pos_twisted.theta != Theta::Twisted || in.pos_twisted.floor == 0.0)
    missing.push_back("twisted spectral curve");
  if (in.norms_untwisted.empty()) missing.push_back("untwisted norm samples");
  if (in.norms_twisted.empty()) missing.push_back("twisted norm samples");
  if (!missing.empty()) {
    std::string what = "theorem_report: missing inputs:";
    for (const auto& m : missing) what += " [" + m + "]";
    throw std::invalid_argument(what);
  }

  TheoremReport rep;
  rep.gamma0 = in.fit_untwisted.gamma;
  rep.gamma_pi = in.fit_twisted.gamma;
  rep.ratio_exponent = in.ratio_fit.gamma;
  rep.c0h = in.pos_untwisted.c_h;
  rep.cpih = in.pos_twisted.c_h;

  {
    CheckResult c;
    c.name = "untwisted-rate";
    const double m_fit = band_margin(rep.gamma0, 0.22, 0.28);
    double flat_lo = INFINITY, flat_hi = 0.0;
    for (const auto& e : in.norms_untwisted) {
      if (e.t < 1.0 || e.t > 128.0) continue;
      const double comp = std::pow(e.t, 0.25) * e.estimate;
      flat_lo = std::min(flat_lo, comp);
      flat_hi = std::max(flat_hi, comp);
    }
    const double spread = (flat_lo > 0.0 && flat_hi > 0.0) ? flat_hi / flat_lo : INFINITY;
    c.pass = m_fit >= 0.0 && spread <= 2.0;
    c.margin = std::min(m_fit, 2.0 - spread);
    c.detail = "gamma=" + fmt(rep.gamma0) + " t^(1/4)-spread=" + fmt(spread);
    rep.checks.push_back(c);
  }
  {
    CheckResult c;
    c.name = "twist-gain";
    const double m_ratio = band_margin(rep.ratio_exponent, 0.35, 0.65);
    const double m_rate = band_margin(rep.gamma_pi, 0.55, 0.90);
    c.pass = m_ratio >= 0.0 && m_rate >= 0.0;
    c.margin = std::min(m_ratio, m_rate);
    c.detail = "ratio-exponent=" + fmt(rep.ratio_exponent) +
               " gamma=" + fmt(rep.gamma_pi);
    rep.checks.push_back(c);
  }
  {
    CheckResult c;
    c.name = "norm-bound";
    double worst = -INFINITY;
    double worst_t = 0.0;
    for (const auto& e : in.norms_twisted) {
      if (e.t < 1.0 || e.t > 128.0) continue;
      const double bound =
          std::pow(1.0 + e.t, -(rep.cpih + 0.25)) * (1.0 + in.slack);
      const double excess = e.estimate / bound - 1.0;
      if (excess > worst) {
        worst = excess;
        worst_t = e.t;
      }
    }
    c.pass = worst <= 0.0;
    c.margin = -worst;
    c.detail = "max excess " + fmt(worst) + " at t=" + fmt(worst_t);
    rep.checks.push_back(c);
  }
  {
    CheckResult c;
    c.name = "spectral-constants";
    const double m0 = 1e-3 - std::abs(rep.c0h);
    const double mpi = rep.cpih - 0.01;
    c.pass = m0 >= 0.0 && mpi >= 0.0 && in.pos_untwisted.ok && in.pos_twisted.ok;
    c.margin = std::min(m0, mpi);
    c.detail = "c0=" + fmt(rep.c0h) + " cpi=" + fmt(rep.cpih);
    rep.checks.push_back(c);
  }

  rep.ok = true;
  for (const auto& c : rep.checks) rep.ok = rep.ok && c.pass;
  return rep;
}

std::string TheoremReport::render_text() const {
  std::ostringstream os;
  os << "decay-rate report\n";
  os << "  gamma_0        " << fmt(gamma0) << "\n";
  os << "  gamma_pi       " << fmt(gamma_pi) << "\n";
  os << "  ratio exponent " << fmt(ratio_exponent) << "\n";
  os << "  c_0^h          " << fmt(c0h) << "\n";
  os << "  c_pi^h         " << fmt(cpih) << "\n";
  for (const auto& c : checks)
    os << "  [" << (c.pass ? "ok" : "FAIL") << "] " << c.name << "  " << c.detail
       << "  (margin " << fmt(c.margin) << ")\n";
  os << (ok ? "all checks passed\n" : "CHECKS FAILED\n");
  return os.str();
}

std::string TheoremReport::render_kv() const {
  std::ostringstream os;
  os << "gamma0=" << fmt(gamma0) << "\n";
  os << "gamma_pi=" << fmt(gamma_pi) << "\n";
  os << "ratio_exponent=" << fmt(ratio_exponent) << "\n";
  os << "c0h=" << fmt(c0h) << "\n";
  os << "cpih=" << fmt(cpih) << "\n";
  for (const auto& c : checks)
    os << "check." << c.name << "=" << (c.pass ? "pass" : "fail") << "\n";
  os << "ok=" << (ok ? "1" : "0") << "\n";
  return os.str();
}

}  // namespace stripheat
