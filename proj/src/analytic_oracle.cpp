#include "stripheat/analytic_oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "stripheat/transverse.hpp"

namespace stripheat {

double gauss_kernel(double x, double y, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("gauss_kernel: t must be > 0");
  const double d = x - y;
  return std::exp(-d * d / (4.0 * t)) / std::sqrt(4.0 * M_PI * t);
}

double truncation_bound(const StripKernelSpec& spec) {
  if (spec.n_max < 1) throw std::invalid_argument("truncation_bound: n_max >= 1");
  const double e1 = eigenvalue_dn(1, spec.a);
  // first dropped term (sup over x2 of |J J'| <= 1/a), ratio of consecutive
  // terms <= exp(-8 (n_max+1) e1 t)
  const double first =
      std::exp(-((2.0 * spec.n_max + 1.0) * (2.0 * spec.n_max + 1.0) - 1.0) * e1 * spec.t) /
      spec.a;
  const double ratio = std::exp(-8.0 * (spec.n_max + 1.0) * e1 * spec.t);
  if (ratio >= 1.0) return INFINITY;
  return first / (1.0 - ratio);
}

double strip_kernel(double x1, double x2, double x1p, double x2p,
                    const StripKernelSpec& spec) {
  if (!(spec.t > 0.0)) throw std::invalid_argument("strip_kernel: t must be > 0");
  const double e1 = eigenvalue_dn(1, spec.a);
  const double p = gauss_kernel(x1, x1p, spec.t);
  double sum = 0.0;
  for (int n = 1; n <= spec.n_max; ++n) {
    const double decay = std::exp((e1 - eigenvalue_dn(n, spec.a)) * spec.t);
    sum += decay * eigenfunction_dn(n, spec.a, x2) * eigenfunction_dn(n, spec.a, x2p);
  }
  return p * sum;
}

Field apply_semigroup_untwisted(const Field& u0, double t, int n_max) {
  if (u0.disc == nullptr)
    throw std::invalid_argument("apply_semigroup_untwisted: field has no grid");
  const Discretization& disc = *u0.disc;
  if (disc.config.theta != Theta::Untwisted)
    throw std::invalid_argument("apply_semigroup_untwisted: untwisted layout required");
  const Grid2D& g = disc.grid;
  if (g.n2 % 2 != 0)
    throw std::invalid_argument("apply_semigroup_untwisted: n2 must be even (Simpson)");
  if (!(t > 0.0) || n_max < 1)
    throw std::invalid_argument("apply_semigroup_untwisted: bad t or n_max");

  const int n1 = g.n1, n2 = g.n2;
  const double a = disc.config.a;
  const double e1 = eigenvalue_dn(1, a);
  const double h1 = g.h1();

  // full nodal matrix, zeros at eliminated nodes
  std::vector<double> node(static_cast<std::size_t>(g.n_nodes()), 0.0);
  for (int k = 0; k < disc.dofs.n_dofs; ++k) {
    const auto [i, j] = disc.dofs.dof_to_node[k];
    node[g.node_index(i, j)] = u0.v[k];
  }

  const std::vector<double> s2 = kern::simpson_weights(n2, g.h2());
  const std::vector<double> s1 = kern::simpson_weights(n1, h1);

  // difference table for the translation-invariant 1D kernel
  std::vector<double> ker(n1 + 1);
  const double c = 1.0 / std::sqrt(4.0 * M_PI * t);
  for (int d = 0; d <= n1; ++d) {
    const double dx = d * h1;
    ker[d] = c * std::exp(-dx * dx / (4.0 * t));
  }

  std::vector<double> out_node(static_cast<std::size_t>(g.n_nodes()), 0.0);
  std::vector<double> coef(n1 + 1), prop(n1 + 1), mode(n2 + 1);
  for (int n = 1; n <= n_max; ++n) {
    for (int j = 0; j <= n2; ++j) mode[j] = eigenfunction_dn(n, a, g.x2(j));

    for (int i = 0; i <= n1; ++i) {
      double acc = 0.0;
      const double* row = &node[g.node_index(i, 0)];
      for (int j = 0; j <= n2; ++j) acc += s2[j] * mode[j] * row[j];
      coef[i] = acc;
    }

    const double decay = std::exp((e1 - eigenvalue_dn(n, a)) * t);
#pragma omp parallel for schedule(static)
    for (int ip = 0; ip <= n1; ++ip) {
      double acc = 0.0;
      for (int i = 0; i <= n1; ++i)
        acc += s1[i] * ker[std::abs(ip - i)] * coef[i];
      prop[ip] = decay * acc;
    }

    for (int ip = 0; ip <= n1; ++ip) {
      double* row = &out_node[g.node_index(ip, 0)];
      for (int j = 0; j <= n2; ++j) row[j] += prop[ip] * mode[j];
    }
  }

  Field out;
  out.disc = u0.disc;
  out.owned = u0.owned;
  out.t = u0.t + t;
  out.v.resize(disc.dofs.n_dofs);
  for (int k = 0; k < disc.dofs.n_dofs; ++k) {
    const auto [i, j] = disc.dofs.dof_to_node[k];
    out.v[k] = out_node[g.node_index(i, j)];
  }
  return out;
}

double norm_S0_exact(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("norm_S0_exact: t must be > 0");
  return std::pow(t, -0.25) *
         std::pow(1.0 + 1.0 / t + std::sqrt(1.0 + 2.0 / t), -0.25);
}

OracleNorm norm_S0_oracle(double t, double a, const OracleNormOptions& opts) {
  if (!(t >= 1.0))
    throw std::invalid_argument("norm_S0_oracle: t >= 1 required");
  if (!(a > 0.0)) throw std::invalid_argument("norm_S0_oracle: a must be > 0");
  if (opts.nq < 8 || opts.nq % 2 != 0)
    throw std::invalid_argument("norm_S0_oracle: nq must be even and >= 8");

  const int nq = opts.nq;
  const double h = 2.0 * opts.x1_extent / nq;
  const std::vector<double> sw = kern::simpson_weights(nq, h);

  // symmetrized weighted kernel: B_ij = c g_i g_j r_{|i-j|},
  // g_i = e^{-x_i^2/8} sqrt(S_i), r_d = e^{-(d h)^2/(8t)}
  std::vector<double> g(nq + 1), r(nq + 1);
  for (int i = 0; i <= nq; ++i) {
    const double x = -opts.x1_extent + i * h;
    g[i] = std::exp(-x * x / 8.0) * std::sqrt(sw[i]);
  }
  for (int d = 0; d <= nq; ++d) {
    const double dx = d * h;
    r[d] = std::exp(-dx * dx / (8.0 * t));
  }
  const double c = 1.0 / std::sqrt(8.0 * M_PI * t);

  std::vector<double> z = g, bz(nq + 1);
  auto apply = [&](const std::vector<double>& in, std::vector<double>& res) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i <= nq; ++i) {
      double acc = 0.0;
      for (int j = 0; j <= nq; ++j) acc += r[std::abs(i - j)] * g[j] * in[j];
      res[i] = c * g[i] * acc;
    }
  };

  OracleNorm out;
  const double e1 = eigenvalue_dn(1, a);
  out.mode_tail = std::exp(-2.0 * t * (eigenvalue_dn(2, a) - e1));

  double lambda = 0.0;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const double zn = std::sqrt(kern::dot_serial(z, z));
    if (!(zn > 0.0)) throw std::runtime_error("norm_S0_oracle: iterate collapsed");
    for (double& v : z) v /= zn;
    apply(z, bz);
    lambda = kern::dot_serial(z, bz);
    double rs = 0.0;
    for (int i = 0; i <= nq; ++i) {
      const double d = bz[i] - lambda * z[i];
      rs += d * d;
    }
    out.iterations = iter + 1;
    out.residual = std::sqrt(rs) / std::max(lambda, 1e-300);
    z = bz;
    if (out.residual <= opts.tol) {
      out.converged = true;
      break;
    }
  }
  out.value = std::sqrt(std::max(0.0, lambda));
  return out;
}

}  // namespace stripheat
