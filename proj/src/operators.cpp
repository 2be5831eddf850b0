#include "stripheat/operators.hpp"

#include <cmath>
#include <cstdio>

namespace stripheat {

std::string FormDescriptor::grid_id() const {
  const char* k = kind == FormKind::Physical     ? "phys"
                  : kind == FormKind::SelfSimilar ? "ss"
                                                  : "ho";
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s_t%s_a%g_E%g_n1%d_n2%d", k, theta_name(theta), a,
                extent, n1, n2);
  return buf;
}

namespace {

// Shared edge walker: calls f(dof_r, dof_c_or_-1, coeff, is_transverse) for
// every lattice edge with at least one active endpoint.
template <typename F>
void for_each_edge(const Discretization& d, F&& f) {
  const Grid2D& g = d.grid;
  const double h1 = g.h1(), h2 = g.h2();
  const int n1 = g.n1, n2 = g.n2;
  const auto dof = [&](int i, int j) -> int {
    return d.dofs.node_to_dof[g.node_index(i, j)];
  };
  // Horizontal edges ((i,j)-(i+1,j)): coefficient w_j / h1 with the same
  // trapezoid weight w_j as the mass (halved on active Neumann wall rows).
  for (int j = 0; j <= n2; ++j) {
    const double w = (j == 0 || j == n2) ? 0.5 * h2 : h2;
    const double c = w / h1;
    for (int i = 0; i < n1; ++i) {
      const int ra = dof(i, j), rb = dof(i + 1, j);
      if (ra < 0 && rb < 0) continue;
      // A wall row where only part of the row is active (twisted layout)
      // still uses its own weight: the eliminated neighbor contributes the
      // Dirichlet pin through the diagonal term.
      if (ra >= 0 && rb >= 0)
        f(ra, rb, c, false);
      else if (ra >= 0)
        f(ra, -1, c, false);
      else
        f(rb, -1, c, false);
    }
  }
  // Vertical edges ((i,j)-(i,j+1)): coefficient h1 / h2.
  const double c2 = h1 / h2;
  for (int i = 1; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const int ra = dof(i, j), rb = dof(i, j + 1);
      if (ra < 0 && rb < 0) continue;
      if (ra >= 0 && rb >= 0)
        f(ra, rb, c2, true);
      else if (ra >= 0)
        f(ra, -1, c2, true);
      else
        f(rb, -1, c2, true);
    }
  }
}

}  // namespace

SymmetricForm assemble_physical(const Discretization& disc) {
  const int n = disc.dofs.n_dofs;
  kern::TripletBuffer buf(n);
  for_each_edge(disc, [&](int r, int c, double coeff, bool) {
    if (c >= 0)
      buf.add_edge(r, c, coeff);
    else
      buf.add(r, r, coeff);
  });
  const double e1h =
      discrete_transverse(disc.config.a, disc.grid.n2, Orientation::DN).e1h;
  for (int i = 0; i < n; ++i) buf.add(i, i, -e1h * disc.dofs.mass[i]);

  SymmetricForm form;
  form.A = buf.finalize();
  form.mass = disc.dofs.mass;
  form.desc.kind = FormKind::Physical;
  form.desc.theta = disc.config.theta;
  form.desc.a = disc.config.a;
  form.desc.extent = disc.grid.x1_extent;
  form.desc.n1 = disc.grid.n1;
  form.desc.n2 = disc.grid.n2;
  form.desc.e1h = e1h;
  form.desc.junction = disc.junction;
  return form;
}

SelfSimilarFamily::SelfSimilarFamily(const StripConfig& config, const SsGridSpec& spec,
                                     JunctionConvention conv)
    : disc_(config, Grid2D(spec.L, config.a, spec.n1, spec.n2), conv) {
  e1h_ = discrete_transverse(config.a, spec.n2, Orientation::DN).e1h;
  const int n = disc_.dofs.n_dofs;

  // Base (longitudinal + harmonic) and scale (transverse - shift) parts on a
  // merged pattern: assemble both triplet sets with the same entry pattern.
  kern::TripletBuffer base(n), scalep(n);
  for_each_edge(disc_, [&](int r, int c, double coeff, bool transverse) {
    kern::TripletBuffer& dst = transverse ? scalep : base;
    kern::TripletBuffer& other = transverse ? base : scalep;
    if (c >= 0) {
      dst.add_edge(r, c, coeff);
      other.add_edge(r, c, 0.0);
    } else {
      dst.add(r, r, coeff);
      other.add(r, r, 0.0);
    }
    if (transverse)
      trans_edges_.push_back({r, c, coeff});
    else
      long_edges_.push_back({r, c, coeff});
  });
  harm_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double y1 = disc_.grid.x1(disc_.dofs.dof_to_node[i].first);
    harm_[i] = disc_.dofs.mass[i] * y1 * y1 / 16.0;
    base.add(i, i, harm_[i]);
    scalep.add(i, i, -e1h_ * disc_.dofs.mass[i]);
  }
  const kern::SparseSym A0 = base.finalize();
  const kern::SparseSym A1 = scalep.finalize();
  // Identical patterns by construction (both buffers saw every entry).
  pattern_ = A0;
  val_base_ = A0.val;
  val_scale_ = A1.val;
}

SymmetricForm SelfSimilarFamily::form_at(double s) const {
  if (s < 0.0) throw std::invalid_argument("self-similar form: s must be >= 0");
  if (s > 40.0) throw std::invalid_argument("self-similar form: s capped at 40");
  const double es = std::exp(s);
  SymmetricForm form;
  form.A = pattern_;
  for (std::size_t k = 0; k < form.A.val.size(); ++k)
    form.A.val[k] = val_base_[k] + es * val_scale_[k];
  form.mass = disc_.dofs.mass;
  form.desc.kind = FormKind::SelfSimilar;
  form.desc.theta = disc_.config.theta;
  form.desc.a = disc_.config.a;
  form.desc.s = s;
  form.desc.extent = disc_.grid.x1_extent;
  form.desc.n1 = disc_.grid.n1;
  form.desc.n2 = disc_.grid.n2;
  form.desc.e1h = e1h_;
  form.desc.junction = disc_.junction;
  const double h2 = disc_.grid.h2();
  if (es / (h2 * h2) > 1e15) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "conditioning: e^s/h2^2 = %.3g exceeds 1e15",
                  es / (h2 * h2));
    form.desc.warning = buf;
  }
  return form;
}

double SelfSimilarFamily::rayleigh(double s, std::span<const double> v) const {
  if (s < 0.0) throw std::invalid_argument("rayleigh: s must be >= 0");
  const auto edge_energy = [&](const std::vector<Edge>& edges) {
    kern::CompensatedSum e;
    for (const Edge& ed : edges) {
      const double d = ed.c >= 0 ? v[ed.r] - v[ed.c] : v[ed.r];
      e.add(ed.coeff * d * d);
    }
    return e.value();
  };
  kern::CompensatedSum harm, nrm2;
  for (std::size_t i = 0; i < v.size(); ++i) {
    harm.add(harm_[i] * v[i] * v[i]);
    nrm2.add(disc_.dofs.mass[i] * v[i] * v[i]);
  }
  const double m2 = nrm2.value();
  const double base = edge_energy(long_edges_) + harm.value();
  const double excess = edge_energy(trans_edges_) - e1h_ * m2;
  return (base + std::exp(s) * excess) / m2;
}

SymmetricForm assemble_selfsimilar(const StripConfig& config, const SsGridSpec& spec,
                                   double s, JunctionConvention conv) {
  return SelfSimilarFamily(config, spec, conv).form_at(s);
}

kern::Tridiag harmonic_tridiag(const HarmonicOscillator1D& ho) {
  if (ho.n < 4) throw std::invalid_argument("harmonic oscillator: n must be >= 4");
  if (ho.dirichlet_at_zero && ho.n % 2 != 0)
    throw std::invalid_argument("harmonic oscillator: Dirichlet at 0 needs a 0-node (even n)");
  const double h = 2.0 * ho.L / ho.n;
  const int mid = ho.n / 2;
  std::vector<int> active;
  for (int i = 1; i < ho.n; ++i) {
    if (ho.dirichlet_at_zero && i == mid) continue;
    active.push_back(i);
  }
  const int n = static_cast<int>(active.size());
  kern::Tridiag T;
  T.diag.assign(n, 0.0);
  T.off.assign(n - 1, 0.0);
  T.mass.assign(n, h);
  for (int k = 0; k < n; ++k) {
    const double y = (active[k] - mid) * h;
    T.diag[k] = 2.0 / h + h * y * y / 16.0;
    if (k + 1 < n && active[k + 1] == active[k] + 1) T.off[k] = -1.0 / h;
    // Non-adjacent active neighbors (across the removed 0-node) stay
    // uncoupled; each kept its full 2/h diagonal from the two edges.
  }
  return T;
}

SymmetricForm assemble_harmonic(const HarmonicOscillator1D& ho) {
  const kern::Tridiag T = harmonic_tridiag(ho);
  const int n = T.n();
  kern::TripletBuffer buf(n);
  for (int i = 0; i < n; ++i) buf.add(i, i, T.diag[i]);
  for (int i = 0; i + 1 < n; ++i) {
    if (T.off[i] != 0.0) {
      buf.add(i, i + 1, T.off[i]);
      buf.add(i + 1, i, T.off[i]);
    }
  }
  SymmetricForm form;
  form.A = buf.finalize();
  form.mass = T.mass;
  form.desc.kind = FormKind::Harmonic1D;
  form.desc.extent = ho.L;
  form.desc.n1 = ho.n;
  form.desc.n2 = ho.dirichlet_at_zero ? 1 : 0;  // flag reused as marker
  return form;
}

std::vector<double> harmonic_eigenvalues(const HarmonicOscillator1D& ho, int k) {
  const kern::Tridiag T = harmonic_tridiag(ho);
  std::vector<double> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) out.push_back(kern::tridiag_eigenvalue(T, i));
  return out;
}

}  // namespace stripheat
