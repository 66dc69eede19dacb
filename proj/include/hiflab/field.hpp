#pragma once

#include <functional>
#include <vector>

#include "hiflab/grid.hpp"

namespace hiflab {

// One real value per node, row-major (y outer, x inner).
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, double fill = 0.0)
      : grid_(grid), values_(static_cast<std::size_t>(grid.num_nodes()), fill) {}

  ScalarField(const Grid& grid, std::vector<double> values);

  static ScalarField from_function(const Grid& grid,
                                   const std::function<double(double, double)>& f);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double operator()(int i, int j) const { return values_[grid_.node(i, j)]; }
  double& operator()(int i, int j) { return values_[grid_.node(i, j)]; }
  double at_node(int id) const { return values_[id]; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

// Symmetric 2x2 matrix per node, stored as three planes.
class MatrixField {
 public:
  explicit MatrixField(const Grid& grid, double a11 = 1.0, double a12 = 0.0,
                       double a22 = 1.0);

  static MatrixField identity(const Grid& grid) { return MatrixField(grid); }
  static MatrixField isotropic(const ScalarField& a);
  static MatrixField diagonal(const ScalarField& a11, const ScalarField& a22);

  const Grid& grid() const { return grid_; }
  std::vector<double>& a11() { return a11_; }
  std::vector<double>& a12() { return a12_; }
  std::vector<double>& a22() { return a22_; }
  const std::vector<double>& a11() const { return a11_; }
  const std::vector<double>& a12() const { return a12_; }
  const std::vector<double>& a22() const { return a22_; }

  double a11(int i, int j) const { return a11_[grid_.node(i, j)]; }
  double a12(int i, int j) const { return a12_[grid_.node(i, j)]; }
  double a22(int i, int j) const { return a22_[grid_.node(i, j)]; }

  // Eigenvalue range of the node's symmetric 2x2 matrix.
  std::pair<double, double> eig_range(int i, int j) const;

  bool is_isotropic_scalar() const;  // a12 == 0 and a11 == a22 everywhere

 private:
  Grid grid_;
  std::vector<double> a11_, a12_, a22_;
};

// Dirichlet data: one value per boundary node, in boundary scan order.
class BoundaryTrace {
 public:
  explicit BoundaryTrace(const Grid& grid, double fill = 0.0)
      : grid_(grid), values_(static_cast<std::size_t>(grid.num_boundary()), fill) {}

  BoundaryTrace(const Grid& grid, std::vector<double> values);

  static BoundaryTrace from_function(const Grid& grid,
                                     const std::function<double(double, double)>& f);
  static BoundaryTrace trace_of(const ScalarField& u);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }

  double operator()(int i, int j) const {
    return values_[grid_.boundary_offset(i, j)];
  }
  double& operator()(int i, int j) { return values_[grid_.boundary_offset(i, j)]; }

  double min() const;
  double max() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

struct GradientField {
  ScalarField dx;
  ScalarField dy;
};

double min_value(const ScalarField& f);
double max_value(const ScalarField& f);
double max_abs(const ScalarField& f);
double max_abs_interior(const ScalarField& f);
double max_abs_on(const ScalarField& f, const std::vector<int>& node_ids);

// Embed Dirichlet data into a full field (boundary = trace, interior = fill).
ScalarField embed_boundary(const BoundaryTrace& f, double interior_fill = 0.0);

void require_same_grid(const Grid& a, const Grid& b, const char* what);
void require_finite(const std::vector<double>& values, const char* what);

}  // namespace hiflab
