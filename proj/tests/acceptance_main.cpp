// Acceptance harness: runs every release criterion at its pinned tolerance
// and prints one pass/fail line each. Exits nonzero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hiflab/admissibility.hpp"
#include "hiflab/elliptic.hpp"
#include "hiflab/field_io.hpp"
#include "hiflab/internal_data.hpp"
#include "hiflab/norms.hpp"
#include "hiflab/reconstruction.hpp"
#include "hiflab/stability.hpp"

using namespace hiflab;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

int g_failures = 0;

void run_criterion(int index, const std::string& name, double budget_seconds,
                   const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.note(std::string("exception: ") + e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require(secs <= budget_seconds,
              "runtime " + format_double(secs) + "s over budget " +
                  format_double(budget_seconds) + "s");
  if (!out.pass) ++g_failures;
  std::printf("[%s] %2d. %s (%.2fs)%s%s\n", out.pass ? "PASS" : "FAIL", index,
              name.c_str(), secs, out.detail.empty() ? "" : " -- ",
              out.detail.c_str());
  std::fflush(stdout);
}

double manufactured_error(const Grid& g, const std::string& name, double c) {
  ManufacturedParams params;
  params.c = c;
  const ManufacturedCase mc = manufactured_case(g, name, params);
  SolveOptions opts;
  opts.tol = 1e-13;
  const auto [u, stats] = solve(mc.a, mc.q, mc.f, opts);
  return norm_linf_diff(u, mc.u_exact);
}

void criterion_forward_solver(Outcome& out) {
  out.require(manufactured_error(Grid(65, 65), "linear", 1.0) <= 1e-12,
              "linear case not stencil-exact");
  out.require(manufactured_error(Grid(65, 65), "exp", 1.0) <= 1e-3,
              "exp case error above 1e-3");
  out.require(manufactured_error(Grid(65, 65), "helmholtz", kPi * kPi) <= 1e-3,
              "helmholtz case error above 1e-3");
  for (const char* name : {"exp", "helmholtz"}) {
    std::vector<double> errors;
    for (int n : {17, 33, 65}) {
      errors.push_back(manufactured_error(
          Grid(n, n), name, std::string(name) == "exp" ? 1.0 : kPi * kPi));
    }
    for (double order : observed_orders(errors)) {
      out.require(order >= 1.8, std::string(name) + " order " +
                                    format_double(order) + " below 1.8");
    }
  }
}

void criterion_eigenvalue(Outcome& out) {
  for (int n : {9, 17, 33}) {
    Grid g(n, n);
    const double lam = first_dirichlet_eigenvalue(g);
    const double exact = dirichlet_eigenvalue_closed_form(g);
    out.require(std::abs(lam - exact) <= 1e-8 * exact,
                "grid " + std::to_string(n) + " off the closed form");
  }
  const double lam65 = first_dirichlet_eigenvalue(Grid(65, 65));
  const double cont = 2.0 * kPi * kPi;
  out.require(std::abs(lam65 - cont) <= 1e-3 * cont,
              "65x65 value not within 0.1% of 2*pi^2");
  out.note("lambda1(65x65) = " + format_double(lam65));
}

void criterion_contraction(Outcome& out) {
  ExperimentPlan plan;
  plan.grid = Grid(65, 65);
  plan.seed = 2026;
  plan.magnitudes = {0.1, 0.5, 0.9};
  const StabilityReport rep = contraction_audit(plan);
  out.require(rep.pass(), "contraction audit criteria failed");
  out.require(rep.summary_value("rho_in_hypothesis_max") <= 0.55,
              "a contraction factor exceeded 0.55");
  out.require(rep.summary_value("inv_norm_ratio_max") <= 2.2,
              "perturbed inverse norm exceeded 2.2x the base");
  out.note("max rho = " + format_double(rep.summary_value("rho_in_hypothesis_max")));
}

void criterion_round_trips(Outcome& out) {
  Grid g(65, 65);
  const MatrixField eye = MatrixField::identity(g);
  const BoundaryTrace f(g, 1.0);
  const double delta = estimate_delta(eye, ScalarField(g, 0.0));
  SolveOptions sopts;
  sopts.tol = 1e-12;

  double worst_err = 0.0, worst_rho = 0.0;
  for (int s = 0; s < 10; ++s) {
    AdmissibleClass cls;
    cls.lambda = 0.45 * delta;
    SamplerConfig cfg;
    cfg.seed = 100 + s;
    cfg.amplitude = 3.0;
    cfg.clamp_lo = -0.45 * delta;
    cfg.clamp_hi = 0.45 * delta;
    const ScalarField q_true = sample_coefficient(cfg, cls, g).field;
    const auto [u, stats] = solve(eye, q_true, f, sopts);
    const ScalarField h = synthesize(DataKind::qu, eye, q_true, u);
    const ReconResult res = recover_q_from_qu(h, eye, f);
    out.require(res.success, "j=1 sample " + std::to_string(s) + " not certified");
    out.require(res.rho_hat < 1.0, "j=1 sample " + std::to_string(s) + " rho >= 1");
    worst_err = std::max(worst_err, norm_linf_diff(res.field, q_true));
    worst_rho = std::max(worst_rho, res.rho_hat);
  }
  out.require(worst_err <= 1e-6,
              "j=1 worst error " + format_double(worst_err) + " above 1e-6");

  for (int s = 0; s < 10; ++s) {
    AdmissibleClass cls;
    cls.q_low = 0.5;
    cls.q_high = 1.0;
    SamplerConfig cfg;
    cfg.seed = 200 + s;
    cfg.amplitude = 1.0;
    const ScalarField q_true = sample_coefficient(cfg, cls, g).field;
    const auto [u, stats] = solve(eye, q_true, f, sopts);
    const ScalarField h = synthesize(DataKind::qu2, eye, q_true, u);
    const ReconResult res = recover_q_from_qu2(h, eye, f);
    out.require(res.success, "j=2 sample " + std::to_string(s) + " not certified");
    out.require(res.rho_hat < 1.0, "j=2 sample " + std::to_string(s) + " rho >= 1");
    worst_err = std::max(worst_err, norm_linf_diff(res.field, q_true));
    worst_rho = std::max(worst_rho, res.rho_hat);
  }
  out.require(worst_err <= 1e-6,
              "worst round-trip error " + format_double(worst_err) + " above 1e-6");
  out.note("worst error = " + format_double(worst_err) +
           ", worst rho = " + format_double(worst_rho));
}

void criterion_explicit_constant(Outcome& out) {
  ExperimentPlan plan;
  plan.grid = Grid(65, 65);
  plan.samples = 20;
  plan.seed = 424242;
  plan.cls.mu = 1.0;
  plan.cls.q_low = 0.5;
  plan.cls.q_high = 1.0;
  plan.cls.min_illumination = 1.0;
  plan.illumination = {"const", 1.0};
  const StabilityReport rep = certify_mt3_constant(plan);
  out.require(rep.pass(), "pairwise certification failed");
  for (const Criterion& c : rep.criteria) {
    out.require(c.pass, c.name + " = " + format_double(c.value));
  }
  out.note("K_theory = " + format_double(rep.summary_value("K_theory")) +
           ", max ratio = " + format_double(rep.summary_value("max_ratio")));
}

void criterion_holder(Outcome& out) {
  ExperimentPlan plan;
  plan.grid = Grid(65, 65);
  plan.samples = 3;
  plan.seed = 31;
  plan.ladder = {0.1, 0.1, 4};

  const StabilityReport hs1 = holder_fit_hs1(plan);
  out.require(hs1.pass(), "hs1 criteria failed");
  out.require(hs1.summary_value("slope_min") > 0.0 &&
                  hs1.summary_value("slope_max") <= 1.0,
              "hs1 slope outside (0,1]");
  out.require(hs1.summary_value("r2_min") >= 0.9, "hs1 fit below R2 = 0.9");

  const StabilityReport hs3 = holder_fit_hs3(plan);
  out.require(hs3.pass(), "hs3 criteria failed");
  out.require(hs3.summary_value("slope_min") > 0.0 &&
                  hs3.summary_value("slope_max") <= 1.0,
              "hs3 slope outside (0,1]");
  out.require(hs3.summary_value("r2_min") >= 0.9, "hs3 fit below R2 = 0.9");
  out.require(hs3.summary_value("identity_gap_max") <= 5e-2,
              "energy identity gap above 5e-2");
  out.note("hs1 slope = [" + format_double(hs1.summary_value("slope_min")) + "," +
           format_double(hs1.summary_value("slope_max")) + "], hs3 gap = " +
           format_double(hs3.summary_value("identity_gap_max")));
}

void criterion_boundary_gradient(Outcome& out) {
  ExperimentPlan plan;
  plan.grid = Grid(65, 65);
  plan.samples = 20;
  plan.seed = 7;
  plan.illumination = {"linear_x", 0.0};
  plan.sigma_lo = 0.5;
  plan.sigma_hi = 2.0;
  const StabilityReport rep = gradient_lower_bound_scan(plan);
  out.require(rep.pass(), "scan criteria failed");
  out.require(rep.summary_value("eta_hat") >= 1e-3, "eta below 1e-3");
  out.require(std::abs(rep.summary_value("eta_reference") - 1.0) <= 1e-6,
              "sigma == 1 reference not 1 within 1e-6");
  out.note("eta_hat = " + format_double(rep.summary_value("eta_hat")));
}

void criterion_positivity(Outcome& out) {
  ExperimentPlan plan;
  plan.grid = Grid(65, 65);
  plan.samples = 4;
  plan.seed = 3;
  plan.band_delta = 0.1;
  plan.illumination = {"const", 1.0};
  plan.cls.coeff_floor = 0.5;
  plan.cls.norm_budget = 4.0;
  const StabilityReport rep = positivity_harnack_check(plan);
  out.require(rep.pass(), "positivity criteria failed");
  out.require(rep.summary_value("eps_hat_min") > 0.0, "a node with u <= 0");
  out.require(rep.summary_value("band_min") >= 0.5, "band minimum below m/2");
  out.note("eps_hat = " + format_double(rep.summary_value("eps_hat_min")) +
           ", harnack = " + format_double(rep.summary_value("harnack_max")));
}

void criterion_two_loads(Outcome& out) {
  Grid g(65, 65);
  const ScalarField u1 =
      ScalarField::from_function(g, [](double x, double) { return std::exp(x); });
  const ScalarField u2 =
      ScalarField::from_function(g, [](double, double y) { return std::exp(y); });
  const ReconResult res = recover_aq_two_loads(u1, u2, BoundaryTrace(g, 1.0),
                                               BoundaryTrace(g, 1.0));
  const auto omega = interior_nodes_with_margin(g, 0.15);
  double a_err = 0.0, q_err = 0.0;
  for (int id : omega) {
    a_err = std::max(a_err, std::abs(res.field.at_node(id) - 1.0));
    q_err = std::max(q_err, std::abs(res.field2->at_node(id) - 1.0));
  }
  out.require(a_err <= 1e-3, "diffusion error " + format_double(a_err));
  out.require(q_err <= 1e-2, "potential error " + format_double(q_err));
  out.note("a err = " + format_double(a_err) + ", q err = " + format_double(q_err));

  std::vector<double> residuals;
  for (int n : {17, 33, 65}) {
    Grid gn(n, n);
    const ScalarField v1 = ScalarField::from_function(
        gn, [](double x, double) { return std::exp(x); });
    const ScalarField v2 = ScalarField::from_function(
        gn, [](double, double y) { return std::exp(y); });
    residuals.push_back(quotient_transform(v1, v2, ScalarField(gn, 1.0)).residual_inf);
  }
  for (double order : observed_orders(residuals)) {
    out.require(order >= 1.8,
                "quotient residual order " + format_double(order) + " below 1.8");
  }
}

// Criterion 10 drives the CLI twice per config and compares produced bytes.
void criterion_determinism(Outcome& out) {
#ifndef HIFLAB_CLI_PATH
  out.require(false, "CLI binary not built");
#else
  const std::string cli = HIFLAB_CLI_PATH;
  const fs::path root =
      fs::temp_directory_path() / "hiflab_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);

  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream os(root / name);
    os << text;
  };
  auto shell = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  auto slurp = [&](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(is)), {});
  };
  auto body_of = [&](const std::string& text) {
    std::istringstream is(text);
    std::string line, body;
    while (std::getline(is, line)) {
      if (!line.starts_with("#")) body += line + "\n";
    }
    return body;
  };

  write("solve.json", R"({"grid": {"n": 65}, "problem": {"catalog": "exp", "c": 1.0},
    "outputs": {"u": "u.hif", "stats": "stats.csv"}})");
  write("synth.json", R"({"grid": {"n": 65}, "problem": {"catalog": "exp", "c": 1.0},
    "data": {"kind": "qu2"}, "noise": {"model": "relative-gaussian", "level": 1e-3, "seed": 9},
    "outputs": {"h": "h.hif"}})");
  write("mt3.json", R"({"grid": {"n": 33}, "experiment": "mt3",
    "plan": {"samples": 5, "seed": 5, "class": {"q_low": 0.5, "q_high": 1.0}}})");

  for (const char* run : {"a", "b"}) {
    const std::string out_dir = (root / run).string();
    out.require(shell("solve --config " + (root / "solve.json").string() +
                      " --out " + out_dir) == 0,
                "solve run failed");
    out.require(shell("synth --config " + (root / "synth.json").string() +
                      " --out " + out_dir) == 0,
                "synth run failed");
    out.require(shell("stability --config " + (root / "mt3.json").string() +
                      " --out " + out_dir) == 0,
                "stability run failed");
  }

  for (const char* name : {"u.hif", "h.hif"}) {
    out.require(slurp(root / "a" / name) == slurp(root / "b" / name),
                std::string(name) + " differs between runs");
  }
  for (const char* name : {"mt3_samples.csv", "mt3_criteria.csv"}) {
    out.require(slurp(root / "a" / name) == slurp(root / "b" / name),
                std::string(name) + " differs between runs");
  }
  out.require(body_of(slurp(root / "a" / "stats.csv")) ==
                  body_of(slurp(root / "b" / "stats.csv")),
              "stats.csv body differs between runs");
  fs::remove_all(root);
#endif
}

}  // namespace

int main() {
  std::printf("hiflab acceptance suite\n");
  run_criterion(1, "forward solver manufactured correctness", 10.0,
                criterion_forward_solver);
  run_criterion(2, "discrete first eigenvalue", 5.0, criterion_eigenvalue);
  run_criterion(3, "perturbative contraction and doubled norm", 30.0,
                criterion_contraction);
  run_criterion(4, "noiseless round-trip reconstructions", 120.0,
                criterion_round_trips);
  run_criterion(5, "explicit-constant certification", 120.0,
                criterion_explicit_constant);
  run_criterion(6, "holder exponent fits and energy identity", 180.0,
                criterion_holder);
  run_criterion(7, "boundary gradient lower bound", 60.0,
                criterion_boundary_gradient);
  run_criterion(8, "positivity and interior Harnack", 30.0, criterion_positivity);
  run_criterion(9, "two-load pipeline on the exponential pair", 60.0,
                criterion_two_loads);
  run_criterion(10, "byte-level determinism of outputs", 120.0,
                criterion_determinism);

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return 1;
}
