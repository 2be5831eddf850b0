#include "stripheat/evolution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "stripheat/transverse.hpp"

namespace stripheat {

namespace {

void check_field(const Field& u, const char* who) {
  if (u.disc == nullptr)
    throw std::invalid_argument(std::string(who) + ": field has no discretization");
  if (u.v.size() != static_cast<std::size_t>(u.disc->dofs.n_dofs))
    throw std::invalid_argument(std::string(who) + ": field size does not match dof count");
}

// Full nodal array (zeros at eliminated / truncation nodes) for interpolation.
std::vector<double> nodal_values(const Field& u) {
  const Grid2D& g = u.disc->grid;
  std::vector<double> node(static_cast<std::size_t>(g.n_nodes()), 0.0);
  const DofMap& d = u.disc->dofs;
  for (int k = 0; k < d.n_dofs; ++k) {
    const auto [i, j] = d.dof_to_node[k];
    node[g.node_index(i, j)] = u.v[k];
  }
  return node;
}

}  // namespace

Field nodal_field(const Discretization& disc,
                  const std::function<double(double, double)>& f) {
  Field u;
  u.disc = &disc;
  u.t = 0.0;
  u.v.resize(disc.dofs.n_dofs);
  for (int k = 0; k < disc.dofs.n_dofs; ++k) {
    const auto [i, j] = disc.dofs.dof_to_node[k];
    u.v[k] = f(disc.grid.x1(i), disc.grid.x2(j));
  }
  return u;
}

double field_norm(const Field& u) {
  check_field(u, "field_norm");
  return std::sqrt(std::max(0.0, kern::dot_weighted(u.v, u.disc->dofs.mass, u.v)));
}

double weighted_norm(const Field& u) {
  check_field(u, "weighted_norm");
  const DofMap& d = u.disc->dofs;
  kern::CompensatedSum acc;
  for (int k = 0; k < d.n_dofs; ++k) {
    const double uv = u.v[k];
    if (uv == 0.0) continue;
    const double lw = log_weight_K(u.disc->grid.x1(d.dof_to_node[k].first));
    if (lw < 300.0) {
      acc.add(d.mass[k] * std::exp(lw) * uv * uv);
    } else {
      // far-field terms: K alone overflows, K * u^2 usually does not
      acc.add(std::exp(std::log(d.mass[k]) + lw + 2.0 * std::log(std::abs(uv))));
    }
  }
  return std::sqrt(std::max(0.0, acc.value()));
}

void CnStepper::step(Field& u, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("CnStepper::step: dt must be > 0");
  check_field(u, "CnStepper::step");
  if (static_cast<int>(u.v.size()) != form_->dim())
    throw std::invalid_argument("CnStepper::step: field/form size mismatch");

  const auto key = std::bit_cast<std::uint64_t>(dt);
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    if (cache_.size() >= 24) cache_.clear();  // long multi-span runs only
    kern::BandMatrix B = kern::band_from_csr(form_->A, form_->mass, 0.5 * dt);
    if (!kern::band_cholesky(B))
      throw std::runtime_error("CnStepper: M + dt/2 A not positive definite");
    it = cache_.emplace(key, std::move(B)).first;
  }

  const int n = form_->dim();
  tmp_.resize(n);
  kern::spmv(form_->A, u.v.data(), tmp_.data());
  const std::vector<double>& m = form_->mass;
  for (int i = 0; i < n; ++i) u.v[i] = m[i] * u.v[i] - 0.5 * dt * tmp_[i];
  kern::band_solve(it->second, u.v);
  u.t += dt;
}

namespace {

EvolveResult evolve_impl(CnStepper& stepper, const SymmetricForm& form, const Field& u0,
                         std::span<const double> checkpoints, const EvolveOptions& opts) {
  check_field(u0, "evolve");
  if (static_cast<int>(u0.v.size()) != form.dim())
    throw std::invalid_argument("evolve: field/form size mismatch");
  if (u0.t < 0.0) throw std::invalid_argument("evolve: start time must be >= 0");
  if (checkpoints.empty()) throw std::invalid_argument("evolve: no checkpoints");
  if (!(opts.dt_min > 0.0) || !(opts.dt_max >= opts.dt_min) || !(opts.divisor > 0.0))
    throw std::invalid_argument("evolve: bad step-size options");

  EvolveResult out;
  out.trace.theta = form.desc.theta;
  out.trace.grid_id = form.desc.grid_id();

  Field u = u0;
  double prev = u.t - 1e-12;
  for (const double cp : checkpoints) {
    if (!(cp >= prev))
      throw std::invalid_argument("evolve: checkpoints must be increasing and >= start time");
    prev = cp;

    while (u.t < cp * (1.0 - 1e-15) - 1e-300) {
      const double t0 = u.t;
      // never let a single span cross a doubling of t, so the dt policy
      // below always sees a current time
      double sub_end = cp;
      const double dbl = (t0 <= 0.0) ? opts.divisor * opts.dt_min : 2.0 * t0;
      if (dbl < sub_end) sub_end = dbl;
      const double dt_nom =
          std::clamp(t0 / opts.divisor, opts.dt_min, opts.dt_max);
      const int nsteps =
          std::max(1, static_cast<int>(std::ceil((sub_end - t0) / dt_nom - 1e-9)));
      const double dt = (sub_end - t0) / nsteps;
      for (int k = 0; k < nsteps; ++k) stepper.step(u, dt);
      u.t = sub_end;  // suppress accumulated roundoff in t
    }
    u.t = cp;

    out.trace.t.push_back(cp);
    out.trace.norm.push_back(field_norm(u));
    if (opts.with_weighted)
      out.trace.weighted.push_back(weighted_norm(to_selfsimilar_auto(u)));
    if (opts.keep_fields) out.fields.push_back(u);
  }
  return out;
}

}  // namespace

EvolveResult evolve(const SymmetricForm& form, const Field& u0,
                    std::span<const double> checkpoints, const EvolveOptions& opts) {
  CnStepper stepper(form);
  return evolve_impl(stepper, form, u0, checkpoints, opts);
}

Field to_selfsimilar(const Field& u, const Discretization& target) {
  check_field(u, "to_selfsimilar");
  const Grid2D& gs = u.disc->grid;
  const Grid2D& gt = target.grid;
  if (gt.n2 != gs.n2 || gt.a != gs.a)
    throw std::invalid_argument("to_selfsimilar: transverse resolution mismatch");
  if (target.config.theta != u.disc->config.theta ||
      target.junction != u.disc->junction)
    throw std::invalid_argument("to_selfsimilar: wall layout mismatch");
  if (u.t < 0.0) throw std::invalid_argument("to_selfsimilar: negative time");

  const double s = std::log1p(u.t);
  const double stretch = std::exp(0.5 * s);
  if (gt.x1_extent * stretch > gs.x1_extent * (1.0 + 1e-12))
    throw std::invalid_argument(
        "to_selfsimilar: target window exceeds the source domain at this s");

  const std::vector<double> node = nodal_values(u);
  const double amp = std::exp(0.25 * s);
  const double h1 = gs.h1();

  Field out;
  out.disc = &target;
  out.t = s;
  out.v.resize(target.dofs.n_dofs);
  for (int k = 0; k < target.dofs.n_dofs; ++k) {
    const auto [i, j] = target.dofs.dof_to_node[k];
    const double xs = stretch * gt.x1(i);
    double ireal = xs / h1 + gs.n1 / 2;
    // snap aligned nodes so s = 0 on the same grid copies values exactly
    if (std::abs(ireal - std::round(ireal)) < 1e-9) ireal = std::round(ireal);
    int i0 = static_cast<int>(std::floor(ireal));
    double frac = ireal - i0;
    if (i0 < 0) { i0 = 0; frac = 0.0; }
    if (i0 >= gs.n1) { i0 = gs.n1 - 1; frac = 1.0; }
    const double val = (1.0 - frac) * node[gs.node_index(i0, j)] +
                       frac * node[gs.node_index(i0 + 1, j)];
    out.v[k] = amp * val;
  }
  return out;
}

Field from_selfsimilar(const Field& ss, const Discretization& target) {
  check_field(ss, "from_selfsimilar");
  const Grid2D& gs = ss.disc->grid;
  const Grid2D& gt = target.grid;
  if (gt.n2 != gs.n2 || gt.a != gs.a)
    throw std::invalid_argument("from_selfsimilar: transverse resolution mismatch");
  if (target.config.theta != ss.disc->config.theta ||
      target.junction != ss.disc->junction)
    throw std::invalid_argument("from_selfsimilar: wall layout mismatch");

  const double s = ss.t;
  if (s < 0.0) throw std::invalid_argument("from_selfsimilar: negative s");
  const double shrink = std::exp(-0.5 * s);
  if (gt.x1_extent * shrink > gs.x1_extent * (1.0 + 1e-12))
    throw std::invalid_argument(
        "from_selfsimilar: target window exceeds the source domain at this s");

  const std::vector<double> node = nodal_values(ss);
  const double amp = std::exp(-0.25 * s);
  const double hy = gs.h1();

  Field out;
  out.disc = &target;
  out.t = std::expm1(s);
  out.v.resize(target.dofs.n_dofs);
  for (int k = 0; k < target.dofs.n_dofs; ++k) {
    const auto [i, j] = target.dofs.dof_to_node[k];
    const double y = shrink * gt.x1(i);
    double ireal = y / hy + gs.n1 / 2;
    if (std::abs(ireal - std::round(ireal)) < 1e-9) ireal = std::round(ireal);
    int i0 = static_cast<int>(std::floor(ireal));
    double frac = ireal - i0;
    if (i0 < 0) { i0 = 0; frac = 0.0; }
    if (i0 >= gs.n1) { i0 = gs.n1 - 1; frac = 1.0; }
    const double val = (1.0 - frac) * node[gs.node_index(i0, j)] +
                       frac * node[gs.node_index(i0 + 1, j)];
    out.v[k] = amp * val;
  }
  return out;
}

Field to_selfsimilar_auto(const Field& u) {
  check_field(u, "to_selfsimilar_auto");
  const Grid2D& g = u.disc->grid;
  const double s = std::log1p(u.t);
  const double l_target =
      std::min(12.0, 0.98 * g.x1_extent * std::exp(-0.5 * s));
  const double h1 = g.h1();
  const int nhalf = std::max(2, static_cast<int>(std::floor(l_target / h1 * (1.0 + 1e-12))));
  const double L = nhalf * h1;
  auto target = std::make_shared<Discretization>(
      u.disc->config, Grid2D(L, g.a, 2 * nhalf, g.n2), u.disc->junction);
  Field out = to_selfsimilar(u, *target);
  out.owned = std::move(target);
  return out;
}

SemigroupNormEstimate semigroup_norm(const StripConfig& config, double t,
                                     const NormOptions& opts) {
  config.validate();
  if (!(t > 0.0)) throw std::invalid_argument("semigroup_norm: t must be > 0");
  if (!(opts.h1 > 0.0) || opts.n2 < 4)
    throw std::invalid_argument("semigroup_norm: bad grid options");

  const double X = std::max(opts.x_floor, 4.0 * std::sqrt(2.0 * t));
  const int n1 = 2 * static_cast<int>(std::ceil(X / opts.h1));
  const Discretization disc(config, Grid2D(X, config.a, n1, opts.n2));
  const SymmetricForm form = assemble_physical(disc);

  SemigroupNormEstimate est;
  est.t = t;
  est.grid_id = form.desc.grid_id();

  // K^{-1/2} per dof
  const int n = disc.dofs.n_dofs;
  std::vector<double> half_k_inv(n);
  for (int k = 0; k < n; ++k) {
    const double x1 = disc.grid.x1(disc.dofs.dof_to_node[k].first);
    half_k_inv[k] = std::exp(-0.5 * log_weight_K(x1));
  }

  const double a = config.a;
  const bool twisted = config.theta == Theta::Twisted;
  Field v = nodal_field(disc, [&](double x1, double x2) {
    const double prof = twisted ? std::cos(M_PI * x2 / (2.0 * a))
                                : eigenfunction_dn(1, a, x2);
    return std::exp(-0.25 * x1 * x1) * prof;
  });
  {
    const double nv = field_norm(v);
    if (!(nv > 0.0)) throw std::runtime_error("semigroup_norm: empty start vector");
    kern::scale(1.0 / nv, v.v);
  }

  CnStepper stepper(form);
  EvolveOptions ev = opts.evolve_opts;
  ev.with_weighted = false;
  ev.keep_fields = true;
  const double horizon[1] = {2.0 * t};

  double lambda = 0.0;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    Field w = v;
    for (int k = 0; k < n; ++k) w.v[k] *= half_k_inv[k];
    w.t = 0.0;
    EvolveResult r = evolve_impl(stepper, form, w, horizon, ev);
    w = std::move(r.fields[0]);
    for (int k = 0; k < n; ++k) w.v[k] *= half_k_inv[k];

    lambda = kern::dot_weighted(v.v, disc.dofs.mass, w.v);
    kern::CompensatedSum rs;
    for (int k = 0; k < n; ++k) {
      const double d = w.v[k] - lambda * v.v[k];
      rs.add(disc.dofs.mass[k] * d * d);
    }
    est.iterations = iter + 1;
    est.residual = std::sqrt(std::max(0.0, rs.value())) / std::max(lambda, 1e-300);
    const double wn = std::sqrt(std::max(0.0, kern::dot_weighted(w.v, disc.dofs.mass, w.v)));
    if (!(wn > 0.0)) throw std::runtime_error("semigroup_norm: iterate collapsed");
    kern::scale(1.0 / wn, w.v);
    v.v = std::move(w.v);
    if (est.residual <= opts.tol) {
      est.converged = true;
      break;
    }
  }
  est.estimate = std::sqrt(std::max(0.0, lambda));
  return est;
}

Field make_gaussian_mode1(const Discretization& disc) {
  const double a = disc.config.a;
  return nodal_field(disc, [a](double x1, double x2) {
    return std::exp(-0.5 * x1 * x1) * eigenfunction_dn(1, a, x2);
  });
}

Field make_gaussian_bump(const Discretization& disc) {
  const double a = disc.config.a;
  return nodal_field(disc, [a](double x1, double x2) {
    return std::exp(-0.5 * x1 * x1) * std::cos(M_PI * x2 / (2.0 * a));
  });
}

}  // namespace stripheat
