#include "stripheat/geometry.hpp"

namespace stripheat {

BoundaryCondition classify_wall_node(double x1, Wall wall, Theta theta,
                                     JunctionConvention conv) {
  if (theta == Theta::Untwisted) {
    return wall == Wall::Bottom ? BoundaryCondition::Dirichlet
                                : BoundaryCondition::Neumann;
  }
  bool dirichlet;
  if (conv == JunctionConvention::Closed)
    dirichlet = (wall == Wall::Bottom) ? (x1 <= 0.0) : (x1 >= 0.0);
  else
    dirichlet = (wall == Wall::Bottom) ? (x1 < 0.0) : (x1 > 0.0);
  return dirichlet ? BoundaryCondition::Dirichlet : BoundaryCondition::Neumann;
}

DofMap build_dof_map(const StripConfig& config, const Grid2D& grid,
                     JunctionConvention conv) {
  config.validate();
  if (grid.n1 % 2 != 0)
    throw std::invalid_argument("build_dof_map: n1 must be even (switching node)");

  const int n1 = grid.n1, n2 = grid.n2;
  const double h1 = grid.h1(), h2 = grid.h2();

  DofMap map;
  map.node_to_dof.assign(grid.n_nodes(), -1);

  for (int i = 0; i <= n1; ++i) {
    if (i == 0 || i == n1) continue;  // truncation columns are Dirichlet
    const double x1 = grid.x1(i);
    for (int j = 0; j <= n2; ++j) {
      double w = h2;
      if (j == 0) {
        if (classify_wall_node(x1, Wall::Bottom, config.theta, conv) ==
            BoundaryCondition::Dirichlet)
          continue;
        w = 0.5 * h2;
      } else if (j == n2) {
        if (classify_wall_node(x1, Wall::Top, config.theta, conv) ==
            BoundaryCondition::Dirichlet)
          continue;
        w = 0.5 * h2;
      }
      map.node_to_dof[grid.node_index(i, j)] = map.n_dofs++;
      map.dof_to_node.emplace_back(i, j);
      map.mass.push_back(h1 * w);
    }
  }
  return map;
}

}  // namespace stripheat
