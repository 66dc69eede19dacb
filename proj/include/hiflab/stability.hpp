#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hiflab/admissibility.hpp"
#include "hiflab/field.hpp"
#include "hiflab/internal_data.hpp"

namespace hiflab {

struct ScaleLadder {
  double t0 = 0.1;
  double ratio = 0.1;
  int count = 4;
  std::vector<double> values() const;
};

// One plan drives every experiment kind; fields not used by a kind are
// ignored. Defaults reproduce the documented catalog runs.
struct ExperimentPlan {
  Grid grid{65, 65};
  int samples = 5;
  std::uint64_t seed = 1;
  int jobs = 1;
  ScaleLadder ladder;
  AdmissibleClass cls;
  IlluminationSpec illumination{"const", 1.0};
  IlluminationSpec illumination2{"linear_x", 0.0};
  NoiseSpec noise;  // applied to every measured solution (one realization)

  double sigma_lo = 0.5, sigma_hi = 2.0;  // diffusion family window (glb)
  double eta_min = 1e-3;                  // boundary gradient threshold
  bool include_reference = true;          // add the σ == 1 row (glb)
  double band_delta = 0.1;                // near-boundary band width (pos)
  double omega_margin = 0.15;             // interior subdomain margin (hs3)
  std::vector<std::pair<double, double>> centers;  // ball centers (vanish)
  std::vector<double> radii;                       // ball radii (vanish)
  std::vector<double> magnitudes;         // fractions of δ (contract)
  bool include_out_of_hypothesis = false; // add a 2δ probe row (contract)
  int grid2 = 0;                          // second grid (interp); 0 = half
};

struct Criterion {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  // ">=", "<=", ">", "<", "finite"
  bool hard = true;
  bool pass = false;
};

struct StabilityReport {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> fingerprint;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, double>> summary;
  std::vector<Criterion> criteria;

  bool pass() const;  // all hard criteria
  std::string samples_csv() const;
  std::string criteria_csv() const;
  std::string summary_text() const;
  double summary_value(const std::string& key) const;
};

StabilityReport lipschitz_ratio_j(int j, const ExperimentPlan& plan);
StabilityReport certify_mt3_constant(const ExperimentPlan& plan);
StabilityReport holder_fit_hs1(const ExperimentPlan& plan);
StabilityReport holder_fit_hs3(const ExperimentPlan& plan);
StabilityReport gradient_lower_bound_scan(const ExperimentPlan& plan);
StabilityReport positivity_harnack_check(const ExperimentPlan& plan);
StabilityReport interpolation_checks(const ExperimentPlan& plan);
StabilityReport vanishing_order_scan(const ExperimentPlan& plan);
StabilityReport contraction_audit(const ExperimentPlan& plan);

// Kind keys: lip_j1 lip_j2 mt3 hs1 hs3 glb pos interp vanish contract.
StabilityReport run_experiment(const std::string& kind, const ExperimentPlan& plan);

// ∫_{B(x0,ρ)} |∇w|² with a one-cell smoothed ball indicator.
double gradient_ball_energy(const ScalarField& w, double cx, double cy,
                            double rho);

// Single positivity/Harnack case; the plan runner aggregates these.
struct PositivityRow {
  double eps_hat = 0.0;      // min u over all nodes
  double band_min = 0.0;     // min u over the near-boundary band
  double harnack_ratio = 0.0;  // sup/inf over the deep interior
};
PositivityRow positivity_harnack_case(const MatrixField& a, const ScalarField& q,
                                      const BoundaryTrace& f, double band_delta);

}  // namespace hiflab
