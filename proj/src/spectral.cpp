#include "stripheat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stripheat {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();

double m_normalize(std::vector<double>& v, std::span<const double> m) {
  const double n2 = kern::dot_weighted(v, m, v);
  const double inv = 1.0 / std::sqrt(n2);
  kern::scale(inv, v);
  return n2;
}
}  // namespace

EigenResult smallest_eigenpair(const SymmetricForm& form, const EigenOptions& opts) {
  const kern::SparseSym& A = form.A;
  const std::vector<double>& m = form.mass;
  const int n = A.n;
  if (n == 0) throw SolverError("smallest_eigenpair: empty form");

  const double scaleB = kern::operator_scale(A, m);
  const double res_floor = 8.0 * kEps * scaleB;

  const double lb = opts.lower_bound ? *opts.lower_bound : kern::gershgorin_lower_bound(A, m);
  double margin = 0.05 * std::max(1.0, std::abs(lb));
  double sigma = lb - margin;

  std::vector<double> shift(n);
  kern::BandMatrix fac;
  auto try_factor = [&](double sg) {
    for (int i = 0; i < n; ++i) shift[i] = -sg * m[i];
    fac = kern::band_from_csr(A, shift);
    return kern::band_cholesky(fac);
  };
  int attempts = 0;
  while (!try_factor(sigma)) {
    if (++attempts > 5)
      throw SolverError("smallest_eigenpair: factorization failed below Gershgorin bound");
    margin *= 2.0;
    sigma = lb - margin;
  }

  std::vector<double> v;
  if (opts.start) {
    v = *opts.start;
    if (static_cast<int>(v.size()) != n)
      throw SolverError("smallest_eigenpair: start vector dimension mismatch");
  } else {
    v.resize(n);
    for (int i = 0; i < n; ++i) v[i] = std::sqrt(m[i]);
  }
  m_normalize(v, m);

  std::vector<double> w(n), Aw(n), r(n);
  double lambda = 0.0, residual = std::numeric_limits<double>::infinity();
  int it = 0, refactors = 0;
  bool converged = false;

  for (it = 1; it <= opts.max_iter; ++it) {
    for (int i = 0; i < n; ++i) w[i] = m[i] * v[i];
    kern::band_solve(fac, w);
    m_normalize(w, m);

    kern::spmv(A, w.data(), Aw.data());
    lambda = kern::dot(w, Aw) / kern::dot_weighted(w, m, w);
    kern::CompensatedSum rs;
    for (int i = 0; i < n; ++i) {
      const double ri = Aw[i] - lambda * m[i] * w[i];
      rs.add(ri * ri / m[i]);
    }
    residual = std::sqrt(std::max(0.0, rs.value()));
    v.swap(w);

    if (residual <= std::max(opts.tol * std::max(1.0, std::abs(lambda)), res_floor)) {
      converged = true;
      break;
    }
    // Rayleigh-quotient shift update once the iterate is close: sigma is
    // kept a few residuals below lambda, which stays below the true
    // eigenvalue (lambda - lambda_min <= residual^2/gap << residual).
    if (residual < 1e-2 * std::max(1.0, std::abs(lambda)) && refactors < 6 &&
        lambda - 4.0 * residual > sigma + 0.1 * margin) {
      double cand = lambda - std::max(4.0 * residual, 32.0 * res_floor);
      int tries = 0;
      while (tries < 3 && !try_factor(cand)) {
        cand = lambda - (lambda - cand) * 4.0;
        ++tries;
      }
      if (tries >= 3 && !fac.factored) {
        // fall back to the safe shift
        try_factor(sigma);
      } else {
        sigma = cand;
        ++refactors;
      }
    }
  }

  int imax = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  if (v[imax] < 0.0)
    for (double& x : v) x = -x;

  return EigenResult{lambda, std::move(v), residual, it, converged};
}

double junction_amplitude(std::span<const double> v, const Discretization& disc) {
  const int mid = disc.grid.n1 / 2;
  kern::CompensatedSum acc;
  for (int i = 0; i < disc.dofs.n_dofs; ++i) {
    if (disc.dofs.dof_to_node[i].first == mid)
      acc.add(disc.dofs.mass[i] * v[i] * v[i]);
  }
  return std::sqrt(std::max(0.0, acc.value()));
}

std::pair<std::vector<double>, double> project_h1(std::span<const double> v,
                                                  const Discretization& disc) {
  const Grid2D& g = disc.grid;
  const int n1 = g.n1, n2 = g.n2, mid = n1 / 2;
  const double h1 = g.h1();
  const bool twisted = disc.config.theta == Theta::Twisted;

  const DiscreteTransverse dn = discrete_transverse(disc.config.a, n2, Orientation::DN);
  const DiscreteTransverse nd = discrete_transverse(disc.config.a, n2, Orientation::ND);
  // ground vectors indexed by grid j
  std::vector<double> g_dn(n2 + 1, 0.0), g_nd(n2 + 1, 0.0);
  for (int k = 0; k < dn.op.n(); ++k) g_dn[dn.active_j[k]] = dn.ground[k];
  for (int k = 0; k < nd.op.n(); ++k) g_nd[nd.active_j[k]] = nd.ground[k];

  std::vector<double> proj(v.size(), 0.0);
  kern::CompensatedSum res2;
  int i_col = -1;
  std::size_t col_begin = 0;
  auto flush_column = [&](std::size_t col_end) {
    if (i_col < 0) return;
    const bool junction = twisted && i_col == mid;
    const std::vector<double>& prof = (!twisted || i_col < mid) ? g_dn : g_nd;
    double c = 0.0, col2 = 0.0;
    for (std::size_t k = col_begin; k < col_end; ++k) {
      const int j = disc.dofs.dof_to_node[k].second;
      const double w = disc.dofs.mass[k] / h1;
      c += w * prof[j] * v[k];
      col2 += disc.dofs.mass[k] * v[k] * v[k];
    }
    if (junction) {
      res2.add(col2);  // profile undefined at the switching column
    } else {
      for (std::size_t k = col_begin; k < col_end; ++k)
        proj[k] = c * prof[disc.dofs.dof_to_node[k].second];
      res2.add(std::max(0.0, col2 - h1 * c * c));
    }
  };
  for (std::size_t k = 0; k < v.size(); ++k) {
    const int i = disc.dofs.dof_to_node[k].first;
    if (i != i_col) {
      flush_column(k);
      i_col = i;
      col_begin = k;
    }
  }
  flush_column(v.size());
  return {std::move(proj), std::max(0.0, res2.value())};
}

SpectralCurve mu_curve(const StripConfig& config, std::span<const double> s_samples,
                       const SsGridSpec& grid, double tol, JunctionConvention conv) {
  for (std::size_t k = 0; k + 1 < s_samples.size(); ++k)
    if (!(s_samples[k] < s_samples[k + 1]))
      throw std::invalid_argument("mu_curve: s samples must be strictly increasing");
  if (!s_samples.empty() && (s_samples.front() < 0.0 || s_samples.back() > 40.0))
    throw std::invalid_argument("mu_curve: s samples must lie in [0, 40]");

  SelfSimilarFamily family(config, grid, conv);
  const double floor =
      harmonic_eigenvalues(HarmonicOscillator1D{grid.L, grid.n1, false}, 1)[0];

  SpectralCurve curve;
  curve.theta = config.theta;
  curve.a = config.a;
  curve.grid = grid;

  for (double s : s_samples) {
    CurveSample sample;
    sample.s = s;
    try {
      SymmetricForm form = family.form_at(s);
      EigenOptions opts;
      opts.tol = tol;
      opts.lower_bound = floor;
      EigenResult res = smallest_eigenpair(form, opts);
      sample.mu = family.rayleigh(s, res.v);
      sample.junction_amplitude = junction_amplitude(res.v, family.disc());
      sample.offmode_residual_sq = project_h1(res.v, family.disc()).second;
      sample.solver_residual = res.residual;
      sample.iterations = res.iterations;
      sample.converged = res.converged;
    } catch (const SolverError&) {
      sample.mu = std::numeric_limits<double>::quiet_NaN();
      sample.converged = false;
    }
    curve.samples.push_back(sample);
  }
  return curve;
}

PositivityReport positivity_check(const SpectralCurve& curve, double margin) {
  PositivityReport rep;
  rep.theta = curve.theta;
  if (curve.samples.empty()) return rep;
  rep.floor = harmonic_eigenvalues(HarmonicOscillator1D{curve.grid.L, curve.grid.n1, false}, 1)[0];

  double mu_min = std::numeric_limits<double>::infinity();
  double spread = 0.0;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < curve.samples.size(); ++k) {
    const double mu = curve.samples[k].mu;
    mu_min = std::min(mu_min, mu);
    spread = std::max(spread, std::abs(mu - curve.samples.front().mu));
    rep.min_margin = std::min(rep.min_margin, mu - rep.floor);
    if (curve.theta == Theta::Twisted && mu <= rep.floor + margin)
      rep.violations.push_back(static_cast<int>(k));
  }
  rep.c_h = mu_min - 0.25;
  rep.flat_spread = spread;
  rep.is_flat_like = spread <= 1e-8 && std::abs(mu_min - 0.25) < 5e-3;
  rep.ok = curve.theta == Theta::Twisted ? rep.violations.empty() : spread <= 1e-10;
  return rep;
}

}  // namespace stripheat
