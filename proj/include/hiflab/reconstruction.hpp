#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hiflab/elliptic.hpp"
#include "hiflab/field.hpp"

namespace hiflab {

struct ReconConfig {
  double tol = 1e-10;        // successive-iterate L∞ stop
  int max_iters = 200;
  double u_floor = 1e-8;
  double lambda_reg = 1e-6;  // Tikhonov weight on ∇a (a-recovery only)
  double omega_margin = 0.15;  // interior subdomain margin for reporting
  int smooth_passes = 0;       // optional averaging after direct recovery
  bool force = false;
};

struct ReconResult {
  ScalarField field;                  // recovered coefficient
  std::optional<ScalarField> field2;  // second coefficient (two-load q)
  int iterations = 0;
  std::vector<double> history;        // successive-iterate L∞ differences
  double rho_hat = 0.0;               // max successive-difference ratio, k >= 2
  double refit_residual = 0.0;        // data refit, full interior
  double refit_residual_omega = 0.0;  // data refit restricted to ω
  bool converged = false;
  bool success = false;
  std::vector<std::string> flags;
};

// Picard recovery of q from H = q u (j=1) and H = q u² (j=2): iterate
// q <- H / u_q^j starting from the unperturbed solve. Declares success only
// if the data refit lands within 10*tol*‖H‖_∞.
ReconResult recover_q_from_qu(const ScalarField& h, const MatrixField& a0,
                              const BoundaryTrace& f, const ReconConfig& cfg = {});
ReconResult recover_q_from_qu2(const ScalarField& h, const MatrixField& a0,
                               const BoundaryTrace& f, const ReconConfig& cfg = {});

// Pointwise q = Δu/u on interior nodes, nearest-interior fill on Γ.
ReconResult recover_q_direct(const ScalarField& u_meas, const ReconConfig& cfg = {});

// Scalar diffusion from one internal solution: least squares on the flux-form
// residual div(a∇u) - qu with a gradient Tikhonov term; a pinned on Γ.
ReconResult recover_a_scalar(const ScalarField& u_meas, const ScalarField& q_known,
                             const BoundaryTrace& a_boundary,
                             const ReconConfig& cfg = {});

// Two-load pipeline: w = u2/u1, recover σ from div(σ∇w)=0 with
// σ|Γ = a_Γ·(u1|Γ)², then a = σ/u1² and q = div(a∇u1)/u1.
ReconResult recover_aq_two_loads(const ScalarField& u1_meas,
                                 const ScalarField& u2_meas,
                                 const BoundaryTrace& a_boundary,
                                 const BoundaryTrace& q_boundary,
                                 const ReconConfig& cfg = {});

}  // namespace hiflab
