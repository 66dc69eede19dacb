#pragma once

#include <optional>
#include <string>

#include "hiflab/admissibility.hpp"
#include "hiflab/field.hpp"
#include "hiflab/sparse.hpp"

namespace hiflab {

struct SolveStats {
  long iterations = 0;
  double residual = 0.0;  // final relative CG residual
  double wall_seconds = 0.0;
  std::string method = "pcg-jacobi";
};

// -div(a∇u) + qu over interior unknowns; Dirichlet data and any volume
// source are folded into the right-hand side.
struct AssembledSystem {
  Grid grid;
  CsrMatrix matrix;
  std::vector<double> rhs;
  std::uint64_t fingerprint_a = 0;
  std::uint64_t fingerprint_q = 0;
};

AssembledSystem assemble(const MatrixField& a, const ScalarField& q,
                         const BoundaryTrace& f,
                         const ScalarField* source = nullptr);

struct SolveOptions {
  double tol = 1e-10;  // relative residual target
  bool force = false;  // skip class precheck (CG still detects indefiniteness)
  long max_iters = 0;  // 0 => 10 * unknowns
};

std::pair<ScalarField, SolveStats> solve(const MatrixField& a,
                                         const ScalarField& q,
                                         const BoundaryTrace& f,
                                         const SolveOptions& opts = {});

std::pair<ScalarField, SolveStats> solve_with_source(
    const MatrixField& a, const ScalarField& q, const BoundaryTrace& f,
    const ScalarField& source, const SolveOptions& opts = {});

struct PerturbOptions {
  double tol = 1e-10;  // successive-iterate L2 stop
  int max_iters = 500;
  bool force = false;
  std::optional<double> delta_est;  // skip recomputing the radius estimate
};

struct PerturbativeResult {
  ScalarField u;
  std::vector<double> step_norms;  // ‖u_{k+1} - u_k‖_L2
  std::vector<double> ratios;      // step_norms[k] / step_norms[k-1]
  int iterations = 0;
  bool converged = false;
};

// Fixed-point iteration u <- S_{a0,q0}(-q_pert*u + F, f). Stops on the
// successive-difference tolerance; throws (reason "contraction") if a ratio
// reaches 1 while differences are still above tolerance.
PerturbativeResult solve_perturbative(const MatrixField& a0,
                                      const ScalarField& q0,
                                      const ScalarField& q_pert,
                                      const BoundaryTrace& f,
                                      const ScalarField& source,
                                      const PerturbOptions& opts = {});

// Largest singular value of the inverse assembled operator in the plain
// discrete L2 pairing (power iteration on A^{-1}); for these symmetric
// systems this is 1/λ_min.
double estimate_operator_norm_inverse(const MatrixField& a0,
                                      const ScalarField& q0,
                                      double rel_tol = 1e-6);

// Perturbation radius proxy: 1 / (2 ‖A^{-1}‖).
double estimate_delta(const MatrixField& a0, const ScalarField& q0,
                      double rel_tol = 1e-6);

}  // namespace hiflab
