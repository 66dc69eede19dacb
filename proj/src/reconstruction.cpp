#include "hiflab/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hiflab/norms.hpp"
#include "hiflab/operators.hpp"

namespace hiflab {

namespace {

double inner_tol(const ReconConfig& cfg) {
  return std::clamp(cfg.tol * 1e-2, 1e-14, 1e-10);
}

ReconResult picard_recover(const ScalarField& h, const MatrixField& a0,
                           const BoundaryTrace& f, int power,
                           const ReconConfig& cfg) {
  require_same_grid(h.grid(), a0.grid(), "picard recovery");
  require_finite(h.values(), "picard recovery");
  if (!(f.min() > 0.0)) {
    throw ReconstructionError("illumination",
                              "picard recovery needs a strictly positive illumination");
  }

  const Grid& g = h.grid();
  SolveOptions sopts;
  sopts.tol = inner_tol(cfg);
  sopts.force = cfg.force;

  auto solve_at = [&](const ScalarField& q) {
    try {
      return solve(a0, q, f, sopts).first;
    } catch (const SolverError& e) {
      throw ReconstructionError("solver",
                                std::string("iterate left the solvable class: ") +
                                    e.what());
    }
  };
  auto data_ratio = [&](const ScalarField& u) {
    if (min_value(u) < cfg.u_floor) {
      throw ReconstructionError("u_floor",
                                "iterate solution dipped below the positivity floor");
    }
    ScalarField q(g);
    for (std::size_t k = 0; k < q.values().size(); ++k) {
      const double u_pow = power == 1 ? u.values()[k]
                                      : u.values()[k] * u.values()[k];
      q.values()[k] = h.values()[k] / u_pow;
    }
    return q;
  };

  ReconResult res{ScalarField(g), std::nullopt, 0, {}, 0.0, 0.0, 0.0, false,
                  false, {}};
  ScalarField q = data_ratio(solve_at(ScalarField(g, 0.0)));

  for (int it = 1; it <= cfg.max_iters; ++it) {
    res.iterations = it;
    const ScalarField u = solve_at(q);
    ScalarField q_next = data_ratio(u);
    const double diff = norm_linf_diff(q_next, q);
    if (!res.history.empty() && res.history.back() > 0.0) {
      res.rho_hat = std::max(res.rho_hat, diff / res.history.back());
    }
    res.history.push_back(diff);
    q = std::move(q_next);
    if (diff < cfg.tol) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) res.flags.push_back("max_iters");

  const ScalarField u_final = solve_at(q);
  ScalarField refit(g);
  for (std::size_t k = 0; k < refit.values().size(); ++k) {
    const double u_pow = power == 1
                             ? u_final.values()[k]
                             : u_final.values()[k] * u_final.values()[k];
    refit.values()[k] = h.values()[k] - q.values()[k] * u_pow;
  }
  res.refit_residual = max_abs(refit);
  res.refit_residual_omega =
      max_abs_on(refit, interior_nodes_with_margin(g, cfg.omega_margin));
  res.success =
      res.converged && res.refit_residual <= 10.0 * cfg.tol * max_abs(h);
  res.field = std::move(q);
  return res;
}

// Least squares for scalar a from div(a∇u) = rhs_data with a given on Γ.
// The flux-form operator is linear in a; normal equations get a Tikhonov
// gradient term and are solved by CG.
ScalarField fit_scalar_coefficient(const ScalarField& u,
                                   const ScalarField& rhs_data,
                                   const BoundaryTrace& a_boundary,
                                   double lambda_reg, const char* what) {
  const Grid& g = u.grid();
  if (max_value(u) - min_value(u) <= 1e-12 * (1.0 + max_abs(u))) {
    throw ReconstructionError("gradient degenerate",
                              std::string(what) + ": internal field is constant");
  }

  const int n_unknown = g.num_interior();
  std::vector<std::map<int, double>> normal(static_cast<std::size_t>(n_unknown));
  std::vector<double> rhs(static_cast<std::size_t>(n_unknown), 0.0);

  const double hx2 = g.hx() * g.hx();
  const double hy2 = g.hy() * g.hy();
  const double cell = g.hx() * g.hy();

  // One stencil equation per node set; boundary unknowns fold into the data.
  auto accumulate = [&](const std::vector<std::pair<int, double>>& stencil,
                        double data, double weight) {
    double d_eff = data;
    for (const auto& [node, coeff] : stencil) {
      const int i = g.node_i(node), j = g.node_j(node);
      if (g.is_boundary(i, j)) d_eff -= coeff * a_boundary(i, j);
    }
    for (const auto& [m_node, cm] : stencil) {
      const int mi = g.node_i(m_node), mj = g.node_j(m_node);
      if (g.is_boundary(mi, mj)) continue;
      const int m = g.interior_index(mi, mj);
      rhs[m] += weight * cm * d_eff;
      for (const auto& [n_node, cn] : stencil) {
        const int ni = g.node_i(n_node), nj = g.node_j(n_node);
        if (g.is_boundary(ni, nj)) continue;
        normal[m][g.interior_index(ni, nj)] += weight * cm * cn;
      }
    }
  };

  const ScalarField lap_u = laplacian(u);
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      std::vector<std::pair<int, double>> stencil;
      stencil.reserve(5);
      stencil.emplace_back(g.node(i, j), 0.5 * lap_u(i, j));
      stencil.emplace_back(g.node(i + 1, j), (u(i + 1, j) - u(i, j)) / (2.0 * hx2));
      stencil.emplace_back(g.node(i - 1, j), (u(i - 1, j) - u(i, j)) / (2.0 * hx2));
      stencil.emplace_back(g.node(i, j + 1), (u(i, j + 1) - u(i, j)) / (2.0 * hy2));
      stencil.emplace_back(g.node(i, j - 1), (u(i, j - 1) - u(i, j)) / (2.0 * hy2));
      accumulate(stencil, rhs_data(i, j), cell);
    }
  }

  // Gradient penalty on faces: couples adjacent unknowns, so no parity
  // sublattice escapes the boundary pinning.
  if (lambda_reg > 0.0) {
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i + 1 < g.nx(); ++i) {
        if (g.is_boundary(i, j) && g.is_boundary(i + 1, j)) continue;
        accumulate({{g.node(i + 1, j), 1.0 / g.hx()},
                    {g.node(i, j), -1.0 / g.hx()}},
                   0.0, lambda_reg * cell);
      }
    }
    for (int j = 0; j + 1 < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        if (g.is_boundary(i, j) && g.is_boundary(i, j + 1)) continue;
        accumulate({{g.node(i, j + 1), 1.0 / g.hy()},
                    {g.node(i, j), -1.0 / g.hy()}},
                   0.0, lambda_reg * cell);
      }
    }
  }

  CsrBuilder builder(n_unknown);
  for (int m = 0; m < n_unknown; ++m) {
    std::vector<std::pair<int, double>> row(normal[m].begin(), normal[m].end());
    builder.add_row(m, std::move(row));
  }
  const CsrMatrix mat = builder.take();

  std::vector<double> a_int;
  try {
    cg_solve(mat, rhs, a_int, 1e-12, 40L * std::max(1, n_unknown));
  } catch (const SolverError& e) {
    throw ReconstructionError("gradient degenerate",
                              std::string(what) +
                                  ": normal equations not solvable: " + e.what());
  }

  ScalarField a = embed_boundary(a_boundary);
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      a(i, j) = a_int[g.interior_index(i, j)];
    }
  }
  return a;
}

}  // namespace

ReconResult recover_q_from_qu(const ScalarField& h, const MatrixField& a0,
                              const BoundaryTrace& f, const ReconConfig& cfg) {
  return picard_recover(h, a0, f, 1, cfg);
}

ReconResult recover_q_from_qu2(const ScalarField& h, const MatrixField& a0,
                               const BoundaryTrace& f, const ReconConfig& cfg) {
  return picard_recover(h, a0, f, 2, cfg);
}

ReconResult recover_q_direct(const ScalarField& u_meas, const ReconConfig& cfg) {
  const Grid& g = u_meas.grid();
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      if (std::abs(u_meas(i, j)) < cfg.u_floor) {
        throw ReconstructionError("u_floor",
                                  "measured field below floor at an interior node");
      }
    }
  }
  const ScalarField lap = laplacian(u_meas);
  ScalarField q(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const int ii = std::clamp(i, 1, g.nx() - 2);
      const int jj = std::clamp(j, 1, g.ny() - 2);
      q(i, j) = lap(ii, jj) / u_meas(ii, jj);
    }
  }
  for (int pass = 0; pass < cfg.smooth_passes; ++pass) {
    ScalarField smoothed = q;
    for (int j = 1; j < g.ny() - 1; ++j) {
      for (int i = 1; i < g.nx() - 1; ++i) {
        smoothed(i, j) = 0.25 * (q(i + 1, j) + q(i - 1, j) + q(i, j + 1) +
                                 q(i, j - 1));
      }
    }
    q = std::move(smoothed);
  }
  ReconResult res{std::move(q), std::nullopt, 1, {}, 0.0, 0.0, 0.0, true, true, {}};
  if (cfg.smooth_passes > 0) res.flags.push_back("post-smoothed");
  return res;
}

ReconResult recover_a_scalar(const ScalarField& u_meas,
                             const ScalarField& q_known,
                             const BoundaryTrace& a_boundary,
                             const ReconConfig& cfg) {
  require_same_grid(u_meas.grid(), q_known.grid(), "recover_a_scalar");
  if (!(a_boundary.min() > 0.0)) {
    throw ReconstructionError("boundary data",
                              "diffusion boundary values must be positive");
  }
  const Grid& g = u_meas.grid();
  ScalarField data(g);
  for (std::size_t k = 0; k < data.values().size(); ++k) {
    data.values()[k] = q_known.values()[k] * u_meas.values()[k];
  }
  ScalarField a = fit_scalar_coefficient(u_meas, data, a_boundary,
                                         cfg.lambda_reg, "recover_a_scalar");

  ScalarField refit = divergence_a_grad(a, u_meas);
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) refit(i, j) -= data(i, j);
  }
  ReconResult res{std::move(a), std::nullopt, 1, {}, 0.0, 0.0, 0.0, true, true, {}};
  res.refit_residual = max_abs_interior(refit);
  res.refit_residual_omega =
      max_abs_on(refit, interior_nodes_with_margin(g, cfg.omega_margin));
  return res;
}

ReconResult recover_aq_two_loads(const ScalarField& u1_meas,
                                 const ScalarField& u2_meas,
                                 const BoundaryTrace& a_boundary,
                                 const BoundaryTrace& q_boundary,
                                 const ReconConfig& cfg) {
  require_same_grid(u1_meas.grid(), u2_meas.grid(), "recover_aq_two_loads");
  const Grid& g = u1_meas.grid();
  if (min_value(u1_meas) < cfg.u_floor) {
    throw ReconstructionError("u_floor", "first load below the positivity floor");
  }

  ScalarField w(g);
  for (std::size_t k = 0; k < w.values().size(); ++k) {
    w.values()[k] = u2_meas.values()[k] / u1_meas.values()[k];
  }
  if (max_value(w) - min_value(w) <= 1e-10 * (1.0 + max_abs(w))) {
    throw ReconstructionError("gradient degenerate",
                              "load quotient is constant");
  }

  BoundaryTrace sigma_boundary(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (g.is_boundary(i, j)) {
        sigma_boundary(i, j) = a_boundary(i, j) * u1_meas(i, j) * u1_meas(i, j);
      }
    }
  }

  const ScalarField sigma = fit_scalar_coefficient(
      w, ScalarField(g, 0.0), sigma_boundary, cfg.lambda_reg,
      "recover_aq_two_loads");

  ScalarField a(g);
  for (std::size_t k = 0; k < a.values().size(); ++k) {
    a.values()[k] =
        sigma.values()[k] / (u1_meas.values()[k] * u1_meas.values()[k]);
  }

  const ScalarField div1 = divergence_a_grad(a, u1_meas);
  ScalarField q = embed_boundary(q_boundary);
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      q(i, j) = div1(i, j) / u1_meas(i, j);
    }
  }

  // Refit against both loads; load 1 vanishes by construction of q.
  const ScalarField div2 = divergence_a_grad(a, u2_meas);
  ScalarField refit(g);
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      const double r1 = div1(i, j) - q(i, j) * u1_meas(i, j);
      const double r2 = div2(i, j) - q(i, j) * u2_meas(i, j);
      refit(i, j) = std::max(std::abs(r1), std::abs(r2));
    }
  }

  ReconResult res{std::move(a), std::move(q), 1, {}, 0.0, 0.0, 0.0, true, true, {}};
  res.refit_residual = max_abs_interior(refit);
  res.refit_residual_omega =
      max_abs_on(refit, interior_nodes_with_margin(g, cfg.omega_margin));
  res.flags.push_back("quotient-critical-points-assumed-extremal");
  return res;
}

}  // namespace hiflab
