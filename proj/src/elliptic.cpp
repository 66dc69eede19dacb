#include "hiflab/elliptic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "hiflab/norms.hpp"

namespace hiflab {

namespace {

// Coercivity precheck: tightest (mu, lambda) covering the coefficients must
// lie in the admissible region mu*lambda < lambda1.
void require_coercive(const MatrixField& a, const ScalarField& q) {
  const Grid& g = a.grid();
  double eig_min = 1e300, eig_max = -1e300;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const auto [lo, hi] = a.eig_range(i, j);
      eig_min = std::min(eig_min, lo);
      eig_max = std::max(eig_max, hi);
    }
  }
  if (!(eig_min > 0.0)) {
    throw SolverError("not elliptic", "diffusion matrix is not positive definite");
  }
  const double mu_req = std::max({1.0, eig_max, 1.0 / eig_min});
  const double lambda_req = std::max(0.0, -min_value(q));
  const double lambda1 = first_dirichlet_eigenvalue(g);
  if (!(mu_req * lambda_req < lambda1)) {
    throw SolverError("coercivity",
                      "coefficients leave the coercive class: mu*lambda = " +
                          format_double(mu_req * lambda_req) +
                          " >= lambda1 = " + format_double(lambda1));
  }
}

ScalarField compose_solution(const Grid& g, const std::vector<double>& interior,
                             const BoundaryTrace& f) {
  ScalarField u = embed_boundary(f);
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      u(i, j) = interior[g.interior_index(i, j)];
    }
  }
  return u;
}

std::pair<ScalarField, SolveStats> solve_assembled(const AssembledSystem& sys,
                                                   const BoundaryTrace& f,
                                                   const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const long cap = opts.max_iters > 0 ? opts.max_iters
                                      : 10L * std::max(1, sys.matrix.n);
  std::vector<double> u_int;
  const CgResult cg = cg_solve(sys.matrix, sys.rhs, u_int, opts.tol, cap);
  SolveStats stats;
  stats.iterations = cg.iterations;
  stats.residual = cg.rel_residual;
  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {compose_solution(sys.grid, u_int, f), stats};
}

double l2_interior(const Grid& g, const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s * g.hx() * g.hy());
}

}  // namespace

AssembledSystem assemble(const MatrixField& a, const ScalarField& q,
                         const BoundaryTrace& f, const ScalarField* source) {
  require_same_grid(a.grid(), q.grid(), "assemble");
  require_same_grid(a.grid(), f.grid(), "assemble");
  if (source) require_same_grid(a.grid(), source->grid(), "assemble");
  const Grid& g = a.grid();

  AssembledSystem sys{g, {}, {}, 0, 0};
  sys.fingerprint_a = fnv1a64(a.a22(), fnv1a64(a.a12(), fnv1a64(a.a11())));
  sys.fingerprint_q = fnv1a64(q.values());

  const double hx2 = g.hx() * g.hx();
  const double hy2 = g.hy() * g.hy();
  const double hxy4 = 4.0 * g.hx() * g.hy();

  CsrBuilder builder(g.num_interior());
  sys.rhs.assign(static_cast<std::size_t>(g.num_interior()), 0.0);

  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      const int row = g.interior_index(i, j);
      const double ae = 0.5 * (a.a11(i, j) + a.a11(i + 1, j));
      const double aw = 0.5 * (a.a11(i, j) + a.a11(i - 1, j));
      const double an = 0.5 * (a.a22(i, j) + a.a22(i, j + 1));
      const double as = 0.5 * (a.a22(i, j) + a.a22(i, j - 1));

      std::vector<std::pair<int, double>> entries;
      entries.reserve(9);
      double rhs = source ? (*source)(i, j) : 0.0;

      auto couple = [&](int ii, int jj, double coeff) {
        if (coeff == 0.0) return;
        if (g.is_interior(ii, jj)) {
          entries.emplace_back(g.interior_index(ii, jj), coeff);
        } else {
          rhs -= coeff * f(ii, jj);
        }
      };

      entries.emplace_back(row, (ae + aw) / hx2 + (an + as) / hy2 + q(i, j));
      couple(i + 1, j, -ae / hx2);
      couple(i - 1, j, -aw / hx2);
      couple(i, j + 1, -an / hy2);
      couple(i, j - 1, -as / hy2);

      // Cross-derivative couplings to the diagonal neighbors.
      const double c_e = a.a12(i + 1, j), c_w = a.a12(i - 1, j);
      const double c_n = a.a12(i, j + 1), c_s = a.a12(i, j - 1);
      couple(i + 1, j + 1, -(c_e + c_n) / hxy4);
      couple(i - 1, j - 1, -(c_w + c_s) / hxy4);
      couple(i - 1, j + 1, (c_w + c_n) / hxy4);
      couple(i + 1, j - 1, (c_e + c_s) / hxy4);

      sys.rhs[row] += rhs;
      builder.add_row(row, std::move(entries));
    }
  }
  sys.matrix = builder.take();
  return sys;
}

std::pair<ScalarField, SolveStats> solve(const MatrixField& a,
                                         const ScalarField& q,
                                         const BoundaryTrace& f,
                                         const SolveOptions& opts) {
  if (!opts.force) require_coercive(a, q);
  return solve_assembled(assemble(a, q, f), f, opts);
}

std::pair<ScalarField, SolveStats> solve_with_source(
    const MatrixField& a, const ScalarField& q, const BoundaryTrace& f,
    const ScalarField& source, const SolveOptions& opts) {
  if (!opts.force) require_coercive(a, q);
  return solve_assembled(assemble(a, q, f, &source), f, opts);
}

PerturbativeResult solve_perturbative(const MatrixField& a0,
                                      const ScalarField& q0,
                                      const ScalarField& q_pert,
                                      const BoundaryTrace& f,
                                      const ScalarField& source,
                                      const PerturbOptions& opts) {
  require_same_grid(a0.grid(), q_pert.grid(), "solve_perturbative");
  if (!opts.force) {
    const double delta =
        opts.delta_est ? *opts.delta_est : estimate_delta(a0, q0);
    if (!(max_abs(q_pert) < delta)) {
      throw SolverError("perturbation radius",
                        "perturbation exceeds the contraction radius estimate " +
                            format_double(delta));
    }
  }

  // Inner solves run tighter than the outer stop so CG error cannot mask the
  // fixed-point differences being measured.
  SolveOptions inner;
  inner.tol = std::max(opts.tol * 1e-3, 1e-14);
  inner.force = opts.force;

  const Grid& g = a0.grid();
  PerturbativeResult res{ScalarField(g), {}, {}, 0, false};

  res.u = solve_with_source(a0, q0, f, source, inner).first;

  for (int it = 1; it <= opts.max_iters; ++it) {
    ScalarField rhs(g);
    for (std::size_t k = 0; k < rhs.values().size(); ++k) {
      rhs.values()[k] =
          -q_pert.values()[k] * res.u.values()[k] + source.values()[k];
    }
    ScalarField next = solve_with_source(a0, q0, f, rhs, inner).first;
    res.iterations = it;

    std::vector<double> diff(next.values().size());
    for (std::size_t k = 0; k < diff.size(); ++k) {
      diff[k] = next.values()[k] - res.u.values()[k];
    }
    const double step = l2_interior(g, diff);
    if (!res.step_norms.empty() && res.step_norms.back() > 0.0) {
      res.ratios.push_back(step / res.step_norms.back());
    }
    res.step_norms.push_back(step);
    res.u = std::move(next);

    if (step < opts.tol) {
      res.converged = true;
      return res;
    }
    if (!res.ratios.empty() && res.ratios.back() >= 1.0) {
      throw SolverError("contraction",
                        "fixed-point ratio reached " +
                            format_double(res.ratios.back()) +
                            " at iteration " + std::to_string(it));
    }
  }
  throw SolverError("fixed point",
                    "fixed-point iteration hit the cap without converging");
}

double estimate_operator_norm_inverse(const MatrixField& a0,
                                      const ScalarField& q0, double rel_tol) {
  require_coercive(a0, q0);
  const Grid& g = a0.grid();
  const BoundaryTrace zero(g, 0.0);
  const AssembledSystem sys = assemble(a0, q0, zero);
  const std::size_t n = static_cast<std::size_t>(sys.matrix.n);

  auto dot = [](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
    return s;
  };

  std::vector<double> x(n, 1.0), y(n);
  {
    const double norm = std::sqrt(dot(x, x));
    for (double& e : x) e /= norm;
  }
  double nu = 0.0;
  const long cap = 10L * static_cast<long>(n) + 100;
  for (long it = 0; it < 100000; ++it) {
    cg_solve(sys.matrix, x, y, std::min(1e-12, rel_tol * 1e-3), cap);
    const double norm = std::sqrt(dot(y, y));
    for (double& e : y) e /= norm;
    x = y;
    // Rayleigh quotient of A^{-1} at x equals 1 / (x' A x).
    std::vector<double> ax;
    sys.matrix.apply(x, ax);
    const double next = 1.0 / dot(x, ax);
    if (it > 0 && std::abs(next - nu) <= rel_tol * std::abs(next)) {
      return next;
    }
    nu = next;
  }
  throw SolverError("eig", "operator norm power iteration did not converge");
}

double estimate_delta(const MatrixField& a0, const ScalarField& q0,
                      double rel_tol) {
  return 0.5 / estimate_operator_norm_inverse(a0, q0, rel_tol);
}

}  // namespace hiflab
