#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hiflab/admissibility.hpp"
#include "hiflab/elliptic.hpp"
#include "hiflab/norms.hpp"
#include "hiflab/util.hpp"

using namespace hiflab;

namespace {
constexpr double kPi = std::numbers::pi;

double solve_error(const ManufacturedCase& mc, double tol = 1e-12) {
  SolveOptions opts;
  opts.tol = tol;
  const auto [u, stats] = solve(mc.a, mc.q, mc.f, opts);
  return norm_linf_diff(u, mc.u_exact);
}
}  // namespace

TEST_CASE("assembled matrix is symmetric to exact equality") {
  Grid g(11, 11);
  SamplerConfig cfg;
  cfg.seed = 5;
  cfg.amplitude = 0.4;
  AdmissibleClass cls;
  cls.mu = 2.0;
  cls.lambda = 1.0;
  const SampledMatrix a = sample_matrix_coefficient(cfg, cls, g, 0.7);
  const SampledField q = sample_coefficient(
      [&] { SamplerConfig c = cfg; c.clamp_lo = -1.0; c.clamp_hi = 1.0; return c; }(),
      cls, g);
  const AssembledSystem sys =
      assemble(a.field, q.field, BoundaryTrace(g, 0.0));
  for (int r = 0; r < sys.matrix.n; ++r) {
    for (int k = sys.matrix.row_ptr[r]; k < sys.matrix.row_ptr[r + 1]; ++k) {
      const int c = sys.matrix.col[k];
      CHECK(sys.matrix.entry(c, r) == sys.matrix.val[k]);
    }
  }
  CHECK(sys.fingerprint_a != sys.fingerprint_q);
}

TEST_CASE("manufactured linear case is reproduced to stencil exactness") {
  Grid g(33, 33);
  const ManufacturedCase mc = manufactured_case(g, "linear");
  CHECK(solve_error(mc) <= 1e-12);
}

TEST_CASE("manufactured exp and helmholtz cases on 65x65") {
  Grid g(65, 65);
  CHECK(solve_error(manufactured_case(g, "exp", {.c = 1.0})) <= 1e-3);
  CHECK(solve_error(manufactured_case(g, "helmholtz", {.c = kPi * kPi})) <= 1e-3);
}

TEST_CASE("rectangular grids solve the manufactured exp case") {
  Grid g(49, 33);
  const ManufacturedCase mc = manufactured_case(g, "exp", {.c = 1.0});
  SolveOptions opts;
  opts.tol = 1e-12;
  const auto [u, stats] = solve(mc.a, mc.q, mc.f, opts);
  CHECK(norm_linf_diff(u, mc.u_exact) <= 5e-3);
}

TEST_CASE("solver converges at order >= 1.8 on the exp case") {
  std::vector<double> errors;
  for (int n : {17, 33, 65}) {
    errors.push_back(solve_error(manufactured_case(Grid(n, n), "exp", {.c = 1.0})));
  }
  for (double order : observed_orders(errors)) CHECK(order >= 1.8);
}

TEST_CASE("anisotropic constant coefficients reproduce an a-harmonic quadratic") {
  // div(a grad u) = 2*2 + 2*0.5 + 2*(-2.5) = 0 for u = x^2 + xy - 2.5 y^2,
  // and the stencil is exact on quadratics, so the solve is exact too.
  Grid g(33, 33);
  MatrixField a(g, 2.0, 0.5, 1.0);
  const auto u_exact = ScalarField::from_function(
      g, [](double x, double y) { return x * x + x * y - 2.5 * y * y; });
  SolveOptions opts;
  opts.tol = 1e-13;
  const auto [u, stats] =
      solve(a, ScalarField(g, 0.0), BoundaryTrace::trace_of(u_exact), opts);
  CHECK(norm_linf_diff(u, u_exact) <= 1e-10);
}

TEST_CASE("perturbative solve with a volume source matches the direct solve") {
  Grid g(33, 33);
  const MatrixField a = MatrixField::identity(g);
  const ScalarField q0(g, 1.0);
  const BoundaryTrace f = make_illumination(g, {"linear_x", 0.0});
  const ScalarField source = ScalarField::from_function(
      g, [](double x, double y) { return std::sin(kPi * x) + y; });
  const double delta = estimate_delta(a, q0);
  const ScalarField q_pert(g, -0.3 * delta);

  PerturbOptions popts;
  popts.tol = 1e-10;
  const PerturbativeResult fp = solve_perturbative(a, q0, q_pert, f, source, popts);
  CHECK(fp.converged);

  ScalarField q_total(g, 1.0 - 0.3 * delta);
  SolveOptions direct;
  direct.tol = 1e-13;
  const auto [u_direct, stats] = solve_with_source(a, q_total, f, source, direct);
  CHECK(norm_linf_diff(fp.u, u_direct) <= 10.0 * popts.tol);
}

TEST_CASE("coercivity violations are detected") {
  Grid g(17, 17);
  const MatrixField a = MatrixField::identity(g);
  const ScalarField q(g, -25.0);
  const BoundaryTrace f(g, 1.0);

  CHECK_THROWS_WITH_AS(solve(a, q, f), doctest::Contains("coercive"), SolverError);

  SolveOptions forced;
  forced.force = true;
  try {
    solve(a, q, f, forced);
    FAIL("expected positive-definiteness failure");
  } catch (const SolverError& e) {
    CHECK(e.reason() == "not positive definite");
  }
}

TEST_CASE("just-coercive negative potential still solves") {
  Grid g(33, 33);
  const ScalarField q(g, -15.0);  // 15 < lambda1 ~ 19.7
  const auto [u, stats] = solve(MatrixField::identity(g), q, BoundaryTrace(g, 1.0));
  CHECK(stats.residual <= 1e-10);
  CHECK(min_value(u) >= 1.0 - 1e-8);  // -15 < 0 amplifies above the boundary data
}

TEST_CASE("solve is linear in the boundary data") {
  Grid g(33, 33);
  const MatrixField a = MatrixField::identity(g);
  const ScalarField q(g, 2.0);
  const BoundaryTrace f1 = make_illumination(g, {"const", 1.0});
  const BoundaryTrace f2 = make_illumination(g, {"linear_x", 0.0});
  std::vector<double> combo_vals(f1.values());
  for (std::size_t k = 0; k < combo_vals.size(); ++k) {
    combo_vals[k] = 0.6 * f1.values()[k] - 1.7 * f2.values()[k];
  }
  SolveOptions opts;
  opts.tol = 1e-12;
  const auto [u1, s1] = solve(a, q, f1, opts);
  const auto [u2, s2] = solve(a, q, f2, opts);
  const auto [uc, sc] = solve(a, q, BoundaryTrace(g, combo_vals), opts);
  double worst = 0.0;
  for (std::size_t k = 0; k < uc.values().size(); ++k) {
    worst = std::max(worst, std::abs(uc.values()[k] - 0.6 * u1.values()[k] +
                                     1.7 * u2.values()[k]));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("discrete maximum principle") {
  Grid g(33, 33);
  const BoundaryTrace f = make_illumination(g, {"linear_x", 0.0});  // f in [0,1]

  SUBCASE("q >= 0 keeps 0 <= u <= max f") {
    const ScalarField q(g, 3.0);
    const auto [u, stats] = solve(MatrixField::identity(g), q, f);
    CHECK(min_value(u) >= -1e-12);
    CHECK(max_value(u) <= 1.0 + 1e-12);
  }
  SUBCASE("q == 0 keeps min f <= u <= max f") {
    ScalarField a_var = ScalarField::from_function(
        g, [](double x, double y) { return 1.5 + 0.4 * x - 0.3 * y; });
    const auto [u, stats] =
        solve(MatrixField::isotropic(a_var), ScalarField(g, 0.0), f);
    CHECK(min_value(u) >= -1e-12);
    CHECK(max_value(u) <= 1.0 + 1e-12);
  }
}

TEST_CASE("inverse operator norm proxy matches the eigenvalue picture") {
  Grid g(9, 9);
  const double lam = first_dirichlet_eigenvalue(g);
  const MatrixField eye = MatrixField::identity(g);
  const ScalarField zero(g, 0.0);

  const double base = estimate_operator_norm_inverse(eye, zero);
  CHECK(base == doctest::Approx(1.0 / lam).epsilon(1e-5));

  MatrixField two(g, 2.0, 0.0, 2.0);
  const double halved = estimate_operator_norm_inverse(two, zero);
  CHECK(halved == doctest::Approx(0.5 / lam).epsilon(1e-5));

  double prev = base;
  for (double shift : {1.0, 3.0, 7.0}) {
    const double cur = estimate_operator_norm_inverse(eye, ScalarField(g, shift));
    CHECK(cur == doctest::Approx(1.0 / (lam + shift)).epsilon(1e-5));
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("delta estimate: value, scaling, and monotonicity") {
  Grid g(9, 9);
  const double lam = first_dirichlet_eigenvalue(g);
  const MatrixField eye = MatrixField::identity(g);
  const ScalarField zero(g, 0.0);

  const double delta = estimate_delta(eye, zero);
  CHECK(delta == doctest::Approx(lam / 2.0).epsilon(1e-5));

  MatrixField two(g, 2.0, 0.0, 2.0);
  CHECK(estimate_delta(two, zero) == doctest::Approx(lam).epsilon(1e-5));

  CHECK(estimate_delta(eye, ScalarField(g, 5.0)) > delta);
}

TEST_CASE("perturbative solve: trivial perturbation converges in one step") {
  Grid g(17, 17);
  const MatrixField a = MatrixField::identity(g);
  const ScalarField zero(g, 0.0);
  const BoundaryTrace f(g, 1.0);
  const PerturbativeResult res =
      solve_perturbative(a, zero, zero, f, zero, {.tol = 1e-10});
  CHECK(res.converged);
  CHECK(res.iterations == 1);
  CHECK(norm_linf_diff(res.u, solve(a, zero, f).first) <= 1e-9);
}

TEST_CASE("perturbative solve contracts at half rate inside the radius") {
  Grid g(33, 33);
  const MatrixField a = MatrixField::identity(g);
  const ScalarField zero(g, 0.0);
  const BoundaryTrace f(g, 1.0);
  const double delta = estimate_delta(a, zero);

  const ScalarField q_pert(g, 0.1 * delta);
  const PerturbativeResult res =
      solve_perturbative(a, zero, q_pert, f, zero, {.tol = 1e-10});
  CHECK(res.converged);
  for (double rho : res.ratios) CHECK(rho <= 0.5 + 0.05);

  // limit agrees with the direct solve
  PerturbOptions opts;
  opts.tol = 1e-8;
  const PerturbativeResult res2 =
      solve_perturbative(a, zero, q_pert, f, zero, opts);
  ScalarField q_tot(g, 0.1 * delta);
  SolveOptions direct;
  direct.tol = 1e-12;
  const auto [u_direct, stats] = solve(a, q_tot, f, direct);
  CHECK(norm_linf_diff(res2.u, u_direct) <= 10.0 * opts.tol);
}

TEST_CASE("perturbative solve refuses perturbations beyond the radius") {
  Grid g(17, 17);
  const MatrixField a = MatrixField::identity(g);
  const ScalarField zero(g, 0.0);
  const double delta = estimate_delta(a, zero);
  CHECK_THROWS_AS(solve_perturbative(a, zero, ScalarField(g, 1.5 * delta),
                                     BoundaryTrace(g, 1.0), zero, {}),
                  SolverError);
}
