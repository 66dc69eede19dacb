#pragma once

#include <vector>

#include "hiflab/util.hpp"

namespace hiflab {

// Compressed-row symmetric sparse matrix. Rows are built in order; columns
// within a row are kept sorted by the builder.
struct CsrMatrix {
  int n = 0;
  std::vector<int> row_ptr;  // size n+1
  std::vector<int> col;
  std::vector<double> val;

  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  std::vector<double> diagonal() const;
  double entry(int row, int column) const;  // 0 if absent
};

class CsrBuilder {
 public:
  explicit CsrBuilder(int n);
  // Entries for one row, (col, value) pairs in any order; duplicates summed.
  void add_row(int row, std::vector<std::pair<int, double>> entries);
  CsrMatrix take();

 private:
  CsrMatrix m_;
  int next_row_ = 0;
};

struct CgResult {
  long iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

// Jacobi-preconditioned conjugate gradients. Throws SolverError (reason
// "not positive definite") on an indefinite pivot, which doubles as the
// coercivity detector, and (reason "cg") when the iteration cap is hit.
CgResult cg_solve(const CsrMatrix& a, const std::vector<double>& b,
                  std::vector<double>& x, double rel_tol, long max_iters);

}  // namespace hiflab
