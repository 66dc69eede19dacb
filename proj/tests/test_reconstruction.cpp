#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hiflab/admissibility.hpp"
#include "hiflab/elliptic.hpp"
#include "hiflab/internal_data.hpp"
#include "hiflab/norms.hpp"
#include "hiflab/reconstruction.hpp"

using namespace hiflab;

namespace {
constexpr double kPi = std::numbers::pi;

// Noiseless, discrete-consistent data: synthesize from the discrete solve.
ScalarField forward_data(DataKind kind, const MatrixField& a,
                         const ScalarField& q, const BoundaryTrace& f) {
  SolveOptions opts;
  opts.tol = 1e-12;
  const auto [u, stats] = solve(a, q, f, opts);
  return synthesize(kind, a, q, u);
}

double max_err_on(const ScalarField& got, const ScalarField& truth,
                  const std::vector<int>& nodes) {
  double m = 0.0;
  for (int id : nodes) m = std::max(m, std::abs(got.at_node(id) - truth.at_node(id)));
  return m;
}

}  // namespace

TEST_CASE("picard j=1: zero data returns zero in one iteration") {
  Grid g(17, 17);
  const ReconResult res = recover_q_from_qu(ScalarField(g, 0.0),
                                            MatrixField::identity(g),
                                            BoundaryTrace(g, 1.0));
  CHECK(res.converged);
  CHECK(res.success);
  CHECK(res.iterations == 1);
  CHECK(max_abs(res.field) == 0.0);
}

TEST_CASE("picard j=1: exp case round trip within 1e-6") {
  Grid g(65, 65);
  const MatrixField eye = MatrixField::identity(g);
  const ScalarField q_true(g, 1.0);
  const BoundaryTrace f = BoundaryTrace::from_function(
      g, [](double x, double) { return std::exp(x); });
  const ScalarField h = forward_data(DataKind::qu, eye, q_true, f);
  const ReconResult res = recover_q_from_qu(h, eye, f);
  CHECK(res.success);
  CHECK(res.rho_hat < 1.0);
  CHECK(norm_linf_diff(res.field, q_true) <= 1e-6);
}

TEST_CASE("picard j=1: random bump inside half the radius, f == 1") {
  Grid g(65, 65);
  const MatrixField eye = MatrixField::identity(g);
  const BoundaryTrace f(g, 1.0);
  const double delta = estimate_delta(eye, ScalarField(g, 0.0));

  for (std::uint64_t seed : {21u, 22u, 23u}) {
    AdmissibleClass cls;
    cls.lambda = 0.45 * delta;
    SamplerConfig cfg;
    cfg.seed = seed;
    cfg.amplitude = 3.0;
    cfg.clamp_lo = -0.45 * delta;
    cfg.clamp_hi = 0.45 * delta;
    const ScalarField q_true = sample_coefficient(cfg, cls, g).field;
    REQUIRE(max_abs(q_true) <= 0.5 * delta);

    const ScalarField h = forward_data(DataKind::qu, eye, q_true, f);
    const ReconResult res = recover_q_from_qu(h, eye, f);
    CHECK(res.success);
    CHECK(res.rho_hat < 1.0);
    CHECK(norm_linf_diff(res.field, q_true) <= 1e-6);
  }
}

TEST_CASE("picard j=2: zero data, exp case, and a two-sided window sample") {
  Grid g(65, 65);
  const MatrixField eye = MatrixField::identity(g);

  const ReconResult zero =
      recover_q_from_qu2(ScalarField(g, 0.0), eye, BoundaryTrace(g, 1.0));
  CHECK(zero.success);
  CHECK(max_abs(zero.field) == 0.0);

  const ScalarField q_true(g, 1.0);
  const BoundaryTrace f = BoundaryTrace::from_function(
      g, [](double x, double) { return std::exp(x); });
  const ScalarField h = forward_data(DataKind::qu2, eye, q_true, f);
  const ReconResult res = recover_q_from_qu2(h, eye, f);
  CHECK(res.success);
  CHECK(norm_linf_diff(res.field, q_true) <= 1e-6);

  AdmissibleClass cls;
  cls.q_low = 0.5;
  cls.q_high = 1.0;
  SamplerConfig cfg;
  cfg.seed = 31;
  cfg.amplitude = 1.0;
  const ScalarField q_win = sample_coefficient(cfg, cls, g).field;
  const BoundaryTrace ones(g, 1.0);
  const ScalarField h_win = forward_data(DataKind::qu2, eye, q_win, ones);
  const ReconResult res_win = recover_q_from_qu2(h_win, eye, ones);
  CHECK(res_win.success);
  CHECK(res_win.rho_hat < 1.0);
  CHECK(res_win.iterations > 0);
  CHECK(norm_linf_diff(res_win.field, q_win) <= 1e-6);
}

TEST_CASE("picard iterations contract monotonically in successive differences") {
  Grid g(33, 33);
  const MatrixField eye = MatrixField::identity(g);
  const BoundaryTrace f(g, 1.0);
  const ScalarField q_true = ScalarField::from_function(
      g, [](double x, double y) { return 2.0 * std::sin(kPi * x) * y; });
  const ScalarField h = forward_data(DataKind::qu, eye, q_true, f);
  const ReconResult res = recover_q_from_qu(h, eye, f);
  CHECK(res.success);
  for (std::size_t k = 1; k < res.history.size(); ++k) {
    if (res.history[k - 1] > 0.0) {
      CHECK(res.history[k] / res.history[k - 1] <= res.rho_hat + 1e-12);
    }
  }
  CHECK(res.rho_hat < 1.0);
}

TEST_CASE("picard recovery is invariant under joint data/illumination scaling") {
  Grid g(33, 33);
  const MatrixField eye = MatrixField::identity(g);
  const BoundaryTrace f(g, 1.0);
  const ScalarField q_true(g, 0.8);
  const ScalarField h = forward_data(DataKind::qu, eye, q_true, f);

  const double t = 4.5;
  ScalarField h_scaled = h;
  for (double& v : h_scaled.values()) v *= t;
  const ReconResult a = recover_q_from_qu(h, eye, f);
  const ReconResult b = recover_q_from_qu(h_scaled, eye, BoundaryTrace(g, t));
  CHECK(norm_linf_diff(a.field, b.field) <= 1e-8);
}

TEST_CASE("picard basin: verified directions at 0.9 of the radius estimate") {
  Grid g(33, 33);
  const MatrixField eye = MatrixField::identity(g);
  const BoundaryTrace f(g, 1.0);
  const double delta = estimate_delta(eye, ScalarField(g, 0.0));

  ScalarField mixed = ScalarField::from_function(g, [&](double x, double y) {
    return std::sin(kPi * x) * std::cos(2.0 * kPi * y);
  });
  for (double& v : mixed.values()) v *= 0.9 * delta;

  for (const ScalarField& q_true : {ScalarField(g, 0.9 * delta), mixed}) {
    for (int power : {1, 2}) {
      const DataKind kind = power == 1 ? DataKind::qu : DataKind::qu2;
      const ScalarField h = forward_data(kind, eye, q_true, f);
      const ReconResult res = power == 1 ? recover_q_from_qu(h, eye, f)
                                         : recover_q_from_qu2(h, eye, f);
      CHECK(res.success);
      CHECK(res.rho_hat < 1.0);
      CHECK(norm_linf_diff(res.field, q_true) <= 1e-6);
    }
  }

  // the strongly negative direction leaves the basin: the first iterate
  // overshoots the coercive window, which surfaces as a solver-class error
  const ScalarField q_neg(g, -0.9 * delta);
  const ScalarField h_neg = forward_data(DataKind::qu, eye, q_neg, f);
  CHECK_THROWS_AS(recover_q_from_qu(h_neg, eye, f), ReconstructionError);

  // at half the radius the negative direction converges again
  const ScalarField q_half(g, -0.5 * delta);
  const ScalarField h_half = forward_data(DataKind::qu2, eye, q_half, f);
  const ReconResult res_half = recover_q_from_qu2(h_half, eye, f);
  CHECK(res_half.success);
  CHECK(norm_linf_diff(res_half.field, q_half) <= 1e-6);
}

TEST_CASE("direct recovery: optional post-smoothing is off by default") {
  Grid g(33, 33);
  const ScalarField u = ScalarField::from_function(
      g, [](double x, double y) { return std::exp(x) + 0.2 * std::sin(kPi * y); });
  const ReconResult raw = recover_q_direct(u);
  CHECK(raw.flags.empty());

  ReconConfig cfg;
  cfg.smooth_passes = 2;
  const ReconResult smoothed = recover_q_direct(u, cfg);
  REQUIRE(!smoothed.flags.empty());
  CHECK(smoothed.flags.front() == "post-smoothed");
  CHECK(lipschitz_seminorm(smoothed.field) <=
        lipschitz_seminorm(raw.field) * (1.0 + 1e-12));
}

TEST_CASE("picard error paths: floor and iteration budget") {
  Grid g(17, 17);
  const MatrixField eye = MatrixField::identity(g);

  // f = 0 on part of the boundary is rejected up front
  CHECK_THROWS_AS(recover_q_from_qu(ScalarField(g, 0.0), eye,
                                    make_illumination(g, {"linear_x", 0.0})),
                  ReconstructionError);

  // an over-tight budget reports max_iters without throwing
  const BoundaryTrace f(g, 1.0);
  const ScalarField q_true(g, 2.0);
  const ScalarField h = forward_data(DataKind::qu, eye, q_true, f);
  ReconConfig cfg;
  cfg.max_iters = 2;
  const ReconResult res = recover_q_from_qu(h, eye, f, cfg);
  CHECK_FALSE(res.converged);
  CHECK_FALSE(res.success);
  REQUIRE(!res.flags.empty());
  CHECK(res.flags.front() == "max_iters");
}

TEST_CASE("direct recovery: q = Δu/u on catalog fields") {
  Grid g(65, 65);

  const ScalarField uc(g, 3.0);
  const ReconResult rc = recover_q_direct(uc);
  CHECK(max_abs(rc.field) == 0.0);

  const ScalarField ue =
      ScalarField::from_function(g, [](double x, double) { return std::exp(x); });
  const ReconResult re = recover_q_direct(ue);
  CHECK(norm_linf_diff(re.field, ScalarField(g, 1.0)) <= 3e-4);

  const ScalarField us = ScalarField::from_function(
      g, [](double x, double) { return std::sin(kPi * x); });
  const ReconResult rs = recover_q_direct(us);
  CHECK(norm_linf_diff(rs.field, ScalarField(g, -kPi * kPi)) <= 3e-3);

  ScalarField floored = ue;
  floored(8, 8) = 0.0;
  CHECK_THROWS_AS(recover_q_direct(floored), ReconstructionError);
}

TEST_CASE("direct recovery converges at order >= 1.8") {
  std::vector<double> errors;
  for (int n : {17, 33, 65}) {
    Grid g(n, n);
    const ScalarField u = ScalarField::from_function(
        g, [](double x, double) { return std::exp(x); });
    errors.push_back(
        norm_linf_diff(recover_q_direct(u).field, ScalarField(g, 1.0)));
  }
  for (double order : observed_orders(errors)) CHECK(order >= 1.8);
}

TEST_CASE("a-recovery: linear solution forces a constant coefficient") {
  Grid g(33, 33);
  const ScalarField u =
      ScalarField::from_function(g, [](double x, double) { return x; });
  const ReconResult res =
      recover_a_scalar(u, ScalarField(g, 0.0), BoundaryTrace(g, 1.0));
  CHECK(norm_linf_diff(res.field, ScalarField(g, 1.0)) <= 1e-7);
}

TEST_CASE("a-recovery: bump round trip on 65x65 within 1e-3 on the interior") {
  Grid g(65, 65);
  AdmissibleClass cls;
  cls.mu = 1.5;
  SamplerConfig cfg;
  cfg.seed = 17;
  cfg.amplitude = 1.2;
  cfg.clamp_lo = 0.7;
  cfg.clamp_hi = 1.3;
  const ScalarField a_true = sample_coefficient(cfg, cls, g).field;
  const ScalarField q(g, -1.0);
  SolveOptions sopts;
  sopts.tol = 1e-12;
  const auto [u, stats] = solve(MatrixField::isotropic(a_true), q,
                                make_illumination(g, {"bilinear", 0.0}), sopts);

  ReconConfig cfg_rec;
  cfg_rec.lambda_reg = 1e-6;
  const ReconResult res =
      recover_a_scalar(u, q, BoundaryTrace::trace_of(a_true), cfg_rec);
  const auto omega = interior_nodes_with_margin(g, cfg_rec.omega_margin);
  CHECK(max_err_on(res.field, a_true, omega) <= 1e-3);

  // noiseless error decreases monotonically along the default λ ladder
  double prev = 1e300;
  for (double reg : {1e-4, 1e-5, 1e-6}) {
    ReconConfig c;
    c.lambda_reg = reg;
    const ReconResult r = recover_a_scalar(u, q, BoundaryTrace::trace_of(a_true), c);
    const double err = max_err_on(r.field, a_true, omega);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("a-recovery: constant internal field is degenerate") {
  Grid g(17, 17);
  try {
    recover_a_scalar(ScalarField(g, 2.0), ScalarField(g, 0.0),
                     BoundaryTrace(g, 1.0));
    FAIL("expected degeneracy");
  } catch (const ReconstructionError& e) {
    CHECK(e.reason() == "gradient degenerate");
  }
}

TEST_CASE("two-load pipeline: symbolic exponential pair") {
  Grid g(33, 33);
  const ScalarField u1 =
      ScalarField::from_function(g, [](double x, double) { return std::exp(x); });
  const ScalarField u2 =
      ScalarField::from_function(g, [](double, double y) { return std::exp(y); });
  const ReconResult res = recover_aq_two_loads(
      u1, u2, BoundaryTrace(g, 1.0), BoundaryTrace(g, 1.0));
  REQUIRE(res.field2.has_value());

  const auto omega = interior_nodes_with_margin(g, 0.15);
  CHECK(max_err_on(res.field, ScalarField(g, 1.0), omega) <= 5e-3);
  CHECK(max_err_on(*res.field2, ScalarField(g, 1.0), omega) <= 5e-2);
  CHECK(!res.flags.empty());
}

TEST_CASE("two-load pipeline: proportional loads are degenerate") {
  Grid g(17, 17);
  const ScalarField u1 =
      ScalarField::from_function(g, [](double x, double) { return 1.0 + x; });
  ScalarField u2 = u1;
  for (double& v : u2.values()) v *= 2.0;
  try {
    recover_aq_two_loads(u1, u2, BoundaryTrace(g, 1.0), BoundaryTrace(g, 0.0));
    FAIL("expected degeneracy");
  } catch (const ReconstructionError& e) {
    CHECK(e.reason() == "gradient degenerate");
  }
}
