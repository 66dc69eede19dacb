#include "hiflab/grid.hpp"

#include <algorithm>

namespace hiflab {

Grid::Grid(int nx, int ny) : nx_(nx), ny_(ny) {
  if (nx < 3 || ny < 3) {
    throw ConfigError("grid needs at least 3 nodes per axis");
  }
  hx_ = 1.0 / (nx - 1);
  hy_ = 1.0 / (ny - 1);
}

int Grid::boundary_offset(int i, int j) const {
  if (!is_boundary(i, j)) return -1;
  if (j == 0) return i;
  if (j == ny_ - 1) return nx_ + 2 * (ny_ - 2) + i;
  return nx_ + 2 * (j - 1) + (i == 0 ? 0 : 1);
}

double Grid::boundary_distance(int i, int j) const {
  const double px = x(i);
  const double py = y(j);
  return std::min(std::min(px, 1.0 - px), std::min(py, 1.0 - py));
}

std::vector<int> Grid::boundary_node_ids() const {
  std::vector<int> ids;
  ids.reserve(num_boundary());
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      if (is_boundary(i, j)) ids.push_back(node(i, j));
    }
  }
  return ids;
}

BoundaryBands::BoundaryBands(const Grid& grid, double d) : delta(d) {
  if (!(d > 0.0)) throw ConfigError("band width must be positive");
  for (int j = 1; j < grid.ny() - 1; ++j) {
    for (int i = 1; i < grid.nx() - 1; ++i) {
      const double dist = grid.boundary_distance(i, j);
      if (dist <= d) band.push_back(grid.node(i, j));
      if (dist >= d) core.push_back(grid.node(i, j));
    }
  }
}

std::vector<int> interior_nodes_with_margin(const Grid& grid, double margin) {
  std::vector<int> ids;
  for (int j = 1; j < grid.ny() - 1; ++j) {
    for (int i = 1; i < grid.nx() - 1; ++i) {
      if (grid.boundary_distance(i, j) >= margin) ids.push_back(grid.node(i, j));
    }
  }
  return ids;
}

}  // namespace hiflab
