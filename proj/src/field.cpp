#include "hiflab/field.hpp"

#include <algorithm>
#include <cmath>

namespace hiflab {

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) {
    throw ConfigError(std::string(what) + ": fields live on different grids");
  }
}

void require_finite(const std::vector<double>& values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw ConfigError(std::string(what) + ": non-finite value");
    }
  }
}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(grid.num_nodes())) {
    throw ConfigError("scalar field value count does not match grid");
  }
}

ScalarField ScalarField::from_function(
    const Grid& grid, const std::function<double(double, double)>& f) {
  ScalarField out(grid);
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      out(i, j) = f(grid.x(i), grid.y(j));
    }
  }
  return out;
}

MatrixField::MatrixField(const Grid& grid, double a11, double a12, double a22)
    : grid_(grid),
      a11_(static_cast<std::size_t>(grid.num_nodes()), a11),
      a12_(static_cast<std::size_t>(grid.num_nodes()), a12),
      a22_(static_cast<std::size_t>(grid.num_nodes()), a22) {}

MatrixField MatrixField::isotropic(const ScalarField& a) {
  MatrixField out(a.grid());
  out.a11_ = a.values();
  out.a22_ = a.values();
  std::fill(out.a12_.begin(), out.a12_.end(), 0.0);
  return out;
}

MatrixField MatrixField::diagonal(const ScalarField& a11, const ScalarField& a22) {
  require_same_grid(a11.grid(), a22.grid(), "diagonal matrix field");
  MatrixField out(a11.grid());
  out.a11_ = a11.values();
  out.a22_ = a22.values();
  std::fill(out.a12_.begin(), out.a12_.end(), 0.0);
  return out;
}

std::pair<double, double> MatrixField::eig_range(int i, int j) const {
  const double m = 0.5 * (a11(i, j) + a22(i, j));
  const double d = 0.5 * (a11(i, j) - a22(i, j));
  const double r = std::sqrt(d * d + a12(i, j) * a12(i, j));
  return {m - r, m + r};
}

bool MatrixField::is_isotropic_scalar() const {
  for (std::size_t k = 0; k < a11_.size(); ++k) {
    if (a12_[k] != 0.0 || a11_[k] != a22_[k]) return false;
  }
  return true;
}

BoundaryTrace::BoundaryTrace(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(grid.num_boundary())) {
    throw ConfigError("boundary trace value count does not match grid");
  }
}

BoundaryTrace BoundaryTrace::from_function(
    const Grid& grid, const std::function<double(double, double)>& f) {
  BoundaryTrace out(grid);
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      if (grid.is_boundary(i, j)) out(i, j) = f(grid.x(i), grid.y(j));
    }
  }
  return out;
}

BoundaryTrace BoundaryTrace::trace_of(const ScalarField& u) {
  BoundaryTrace out(u.grid());
  const Grid& g = u.grid();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (g.is_boundary(i, j)) out(i, j) = u(i, j);
    }
  }
  return out;
}

double BoundaryTrace::min() const {
  return *std::min_element(values_.begin(), values_.end());
}

double BoundaryTrace::max() const {
  return *std::max_element(values_.begin(), values_.end());
}

double min_value(const ScalarField& f) {
  return *std::min_element(f.values().begin(), f.values().end());
}

double max_value(const ScalarField& f) {
  return *std::max_element(f.values().begin(), f.values().end());
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_interior(const ScalarField& f) {
  const Grid& g = f.grid();
  double m = 0.0;
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      m = std::max(m, std::abs(f(i, j)));
    }
  }
  return m;
}

double max_abs_on(const ScalarField& f, const std::vector<int>& node_ids) {
  double m = 0.0;
  for (int id : node_ids) m = std::max(m, std::abs(f.at_node(id)));
  return m;
}

ScalarField embed_boundary(const BoundaryTrace& f, double interior_fill) {
  const Grid& g = f.grid();
  ScalarField out(g, interior_fill);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (g.is_boundary(i, j)) out(i, j) = f(i, j);
    }
  }
  return out;
}

}  // namespace hiflab
