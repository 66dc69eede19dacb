#include "hiflab/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace hiflab {

void CsrMatrix::apply(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(static_cast<std::size_t>(n), 0.0);
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
    y[r] = s;
  }
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(n), 0.0);
  for (int r = 0; r < n; ++r) {
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (col[k] == r) d[r] += val[k];
    }
  }
  return d;
}

double CsrMatrix::entry(int row, int column) const {
  for (int k = row_ptr[row]; k < row_ptr[row + 1]; ++k) {
    if (col[k] == column) return val[k];
  }
  return 0.0;
}

CsrBuilder::CsrBuilder(int n) {
  m_.n = n;
  m_.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
}

void CsrBuilder::add_row(int row, std::vector<std::pair<int, double>> entries) {
  if (row != next_row_) throw ConfigError("csr rows must be added in order");
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (k > 0 && entries[k].first == entries[k - 1].first) {
      m_.val.back() += entries[k].second;
    } else {
      m_.col.push_back(entries[k].first);
      m_.val.push_back(entries[k].second);
    }
  }
  m_.row_ptr[static_cast<std::size_t>(row) + 1] = static_cast<int>(m_.col.size());
  ++next_row_;
}

CsrMatrix CsrBuilder::take() {
  if (next_row_ != m_.n) throw ConfigError("csr builder: missing rows");
  return std::move(m_);
}

CgResult cg_solve(const CsrMatrix& a, const std::vector<double>& b,
                  std::vector<double>& x, double rel_tol, long max_iters) {
  const std::size_t n = static_cast<std::size_t>(a.n);
  x.assign(n, 0.0);

  auto dot = [](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
    return s;
  };

  const double b_norm = std::sqrt(dot(b, b));
  CgResult res;
  if (b_norm == 0.0) {
    res.converged = true;
    return res;
  }

  const std::vector<double> diag = a.diagonal();
  std::vector<double> inv_diag(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(diag[k] > 0.0)) {
      throw SolverError("not positive definite",
                        "nonpositive diagonal entry in assembled system");
    }
    inv_diag[k] = 1.0 / diag[k];
  }

  std::vector<double> r = b;          // x0 = 0
  std::vector<double> z(n), p(n), ap(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
  p = z;
  double rz = dot(r, z);

  for (long it = 1; it <= max_iters; ++it) {
    a.apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) {
      throw SolverError("not positive definite",
                        "CG breakdown: operator is not positive definite");
    }
    const double alpha = rz / pap;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
    }
    const double r_norm = std::sqrt(dot(r, r));
    res.iterations = it;
    res.rel_residual = r_norm / b_norm;
    if (res.rel_residual <= rel_tol) {
      res.converged = true;
      return res;
    }
    for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
  }
  throw SolverError("cg", "CG did not converge within the iteration cap");
}

}  // namespace hiflab
