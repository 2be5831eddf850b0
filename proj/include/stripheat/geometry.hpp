#pragma once

// Wall classification and active-DOF maps for the truncated strip.
//
// Nodes on Dirichlet segments are eliminated from the unknowns; Neumann wall
// nodes stay active with halved transverse mass (lumped trapezoid weight).
// Both truncation columns i = 0 and i = n1 are always Dirichlet.

#include <cstdint>
#include <utility>
#include <vector>

#include "stripheat/core.hpp"

namespace stripheat {

enum class Wall { Bottom, Top };
enum class BoundaryCondition { Dirichlet, Neumann };

// What happens exactly at the switching node x1 = 0 of the twisted layout.
// Closed (default): both wall nodes at x1 = 0 are Dirichlet. Open: neither
// is. The difference is an O(h1) perturbation of eigenvalues, reported by
// the convergence study.
enum class JunctionConvention { Closed, Open };

BoundaryCondition classify_wall_node(double x1, Wall wall, Theta theta,
                                     JunctionConvention conv = JunctionConvention::Closed);

struct DofMap {
  int n_dofs = 0;
  // node index (i*(n2+1)+j) -> dof index, -1 for eliminated nodes.
  std::vector<std::int32_t> node_to_dof;
  // dof -> (i, j)
  std::vector<std::pair<std::int32_t, std::int32_t>> dof_to_node;
  // lumped mass h1 * w_j per dof (w_j = h2 inside, h2/2 on a Neumann wall)
  std::vector<double> mass;
};

// Deterministic lexicographic ordering in (i, j); j runs fastest, so the
// assembled operators have bandwidth n2 + 1.
DofMap build_dof_map(const StripConfig& config, const Grid2D& grid,
                     JunctionConvention conv = JunctionConvention::Closed);

// Bundle most modules pass around.
struct Discretization {
  StripConfig config;
  Grid2D grid;
  JunctionConvention junction = JunctionConvention::Closed;
  DofMap dofs;

  Discretization() = default;
  Discretization(const StripConfig& c, const Grid2D& g,
                 JunctionConvention conv = JunctionConvention::Closed)
      : config(c), grid(g), junction(conv), dofs(build_dof_map(c, g, conv)) {}
};

}  // namespace stripheat
