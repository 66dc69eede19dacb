#pragma once

#include <vector>

#include "hiflab/util.hpp"

namespace hiflab {

// Uniform node-centered grid on the closed unit square. Node (i, j) sits at
// (i*hx, j*hy), row-major storage with y as the outer index. Every node is
// either boundary or interior.
class Grid {
 public:
  Grid(int nx, int ny);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }

  int num_nodes() const { return nx_ * ny_; }
  int num_interior() const { return (nx_ - 2) * (ny_ - 2); }
  int num_boundary() const { return num_nodes() - num_interior(); }

  int node(int i, int j) const { return j * nx_ + i; }
  int node_i(int id) const { return id % nx_; }
  int node_j(int id) const { return id / nx_; }

  double x(int i) const { return i * hx_; }
  double y(int j) const { return j * hy_; }

  bool is_boundary(int i, int j) const {
    return i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1;
  }
  bool is_interior(int i, int j) const { return !is_boundary(i, j); }

  // Position of an interior node in the interior-only numbering, -1 on Γ.
  int interior_index(int i, int j) const {
    return is_boundary(i, j) ? -1 : (j - 1) * (nx_ - 2) + (i - 1);
  }

  // Position of a boundary node in the row-major scan of Γ, -1 if interior.
  int boundary_offset(int i, int j) const;

  // Exact distance to Γ for the unit square.
  double boundary_distance(int i, int j) const;

  std::vector<int> boundary_node_ids() const;

  bool operator==(const Grid& other) const {
    return nx_ == other.nx_ && ny_ == other.ny_;
  }

 private:
  int nx_, ny_;
  double hx_, hy_;
};

// Near-boundary band and deep interior, both over interior nodes:
// the band holds dist <= delta, the core holds dist >= delta.
struct BoundaryBands {
  BoundaryBands(const Grid& grid, double delta);

  double delta;
  std::vector<int> band;  // node ids with boundary_distance <= delta
  std::vector<int> core;  // node ids with boundary_distance >= delta
};

// Interior node ids with boundary_distance >= margin (the ω ⋐ Ω proxy).
std::vector<int> interior_nodes_with_margin(const Grid& grid, double margin);

}  // namespace hiflab
