#include "hiflab/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "hiflab/elliptic.hpp"
#include "hiflab/internal_data.hpp"
#include "hiflab/norms.hpp"
#include "hiflab/operators.hpp"

namespace hiflab {

namespace {

constexpr double kContractionMargin = 0.05;
constexpr double kSlopeMargin = 0.1;
constexpr double kFlatnessMargin = 0.2;
constexpr double kR2Min = 0.9;
constexpr double kIdentityGapMax = 5e-2;
constexpr double kInvNormFactor = 2.2;

std::vector<double> ladder_values(const ScaleLadder& ladder) {
  if (ladder.count < 1) throw ConfigError("ladder needs at least one scale");
  if (!(ladder.t0 > 0.0) || !(ladder.ratio > 0.0)) {
    throw ConfigError("ladder scales must be positive");
  }
  std::vector<double> t(static_cast<std::size_t>(ladder.count));
  double v = ladder.t0;
  for (int i = 0; i < ladder.count; ++i) {
    t[i] = v;
    v *= ladder.ratio;
  }
  return t;
}

// Deterministic parallel map: slot i is written only by the worker that drew
// index i, so merge order never depends on scheduling.
template <typename Fn>
void run_indexed(int count, int jobs, Fn&& fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

void add_common_fingerprint(StabilityReport& rep, const ExperimentPlan& plan) {
  rep.fingerprint.emplace_back("grid", std::to_string(plan.grid.nx()) + "x" +
                                           std::to_string(plan.grid.ny()));
  rep.fingerprint.emplace_back("seed", std::to_string(plan.seed));
  rep.fingerprint.emplace_back("samples", std::to_string(plan.samples));
  rep.fingerprint.emplace_back("ladder",
                               format_double(plan.ladder.t0) + "*" +
                                   format_double(plan.ladder.ratio) + "^k x" +
                                   std::to_string(plan.ladder.count));
  rep.fingerprint.emplace_back("domain", "unit square (smooth-domain deviation)");
  rep.fingerprint.emplace_back("norms", "discrete");
}

void add_criterion(StabilityReport& rep, const std::string& name, double value,
                   const std::string& relation, double threshold,
                   bool hard = true) {
  bool pass = false;
  if (relation == "<=") pass = value <= threshold;
  else if (relation == ">=") pass = value >= threshold;
  else if (relation == "<") pass = value < threshold;
  else if (relation == ">") pass = value > threshold;
  else if (relation == "finite") pass = std::isfinite(value);
  else throw ConfigError("unknown criterion relation: " + relation);
  rep.criteria.push_back({name, value, threshold, relation, hard, pass});
}

// Tapered sample: seeded cosine series times the boundary-vanishing weight
// 16x(1-x)y(1-y), normalized to unit sup norm.
ScalarField tapered_bump(const Grid& grid, std::uint64_t seed, bool negative) {
  SamplerConfig cfg;
  cfg.seed = seed;
  cfg.amplitude = 1.0;
  cfg.modes = 4;
  cfg.clamp_lo = -1e30;
  cfg.clamp_hi = 1e30;
  AdmissibleClass wide;
  wide.lambda = 1e30;
  ScalarField b = sample_coefficient(cfg, wide, grid).field;
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const double x = grid.x(i), y = grid.y(j);
      const double taper = 16.0 * x * (1.0 - x) * y * (1.0 - y);
      b(i, j) *= taper;
    }
  }
  if (negative) {
    for (double& v : b.values()) v = -v * v;
  }
  const double scale = max_abs(b);
  if (!(scale > 0.0)) throw ConfigError("degenerate bump sample");
  for (double& v : b.values()) v /= scale;
  return b;
}

ScalarField sampled_window_field(const Grid& grid, std::uint64_t seed, double lo,
                                 double hi, double amplitude = 1.0) {
  SamplerConfig cfg;
  cfg.seed = seed;
  cfg.amplitude = amplitude * (hi - lo);
  cfg.clamp_lo = lo;
  cfg.clamp_hi = hi;
  AdmissibleClass generic;
  generic.lambda = std::max(0.0, -lo);
  return sample_coefficient(cfg, generic, grid).field;
}

double min_boundary_gradient(const ScalarField& u) {
  const Grid& g = u.grid();
  const GradientField grad = gradient(u);
  double m = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (!g.is_boundary(i, j)) continue;
      m = std::min(m, std::hypot(grad.dx(i, j), grad.dy(i, j)));
    }
  }
  return m;
}

}  // namespace

std::vector<double> ScaleLadder::values() const { return ladder_values(*this); }

bool StabilityReport::pass() const {
  return std::all_of(criteria.begin(), criteria.end(),
                     [](const Criterion& c) { return !c.hard || c.pass; });
}

std::string StabilityReport::samples_csv() const {
  std::ostringstream os;
  os << "# experiment=" << experiment << "\n";
  for (const auto& [k, v] : fingerprint) os << "# " << k << "=" << v << "\n";
  for (std::size_t c = 0; c < columns.size(); ++c) {
    os << columns[c] << (c + 1 < columns.size() ? "," : "");
  }
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << format_double(row[c]) << (c + 1 < row.size() ? "," : "");
    }
    os << "\n";
  }
  return os.str();
}

std::string StabilityReport::criteria_csv() const {
  std::ostringstream os;
  os << "# experiment=" << experiment << "\n";
  for (const auto& [k, v] : fingerprint) os << "# " << k << "=" << v << "\n";
  for (const auto& [k, v] : summary) {
    os << "# summary " << k << "=" << format_double(v) << "\n";
  }
  os << "criterion,value,relation,threshold,hard,pass\n";
  for (const Criterion& c : criteria) {
    os << c.name << "," << format_double(c.value) << "," << c.relation << ","
       << format_double(c.threshold) << "," << (c.hard ? 1 : 0) << ","
       << (c.pass ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string StabilityReport::summary_text() const {
  std::ostringstream os;
  os << "== " << experiment << " ==\n";
  for (const auto& [k, v] : fingerprint) os << "   " << k << " = " << v << "\n";
  for (const auto& [k, v] : summary) os << "   " << k << " = " << format_double(v) << "\n";
  for (const Criterion& c : criteria) {
    os << "   [" << (c.pass ? "PASS" : (c.hard ? "FAIL" : "info")) << "] "
       << c.name << ": " << format_double(c.value) << " " << c.relation << " "
       << format_double(c.threshold) << "\n";
  }
  os << "   overall: " << (pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

double StabilityReport::summary_value(const std::string& key) const {
  for (const auto& [k, v] : summary) {
    if (k == key) return v;
  }
  throw ConfigError("no summary value named " + key);
}

double gradient_ball_energy(const ScalarField& w, double cx, double cy,
                            double rho) {
  const Grid& g = w.grid();
  const GradientField grad = gradient(w);
  const double hbar = std::max(g.hx(), g.hy());
  double e = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double d = std::hypot(g.x(i) - cx, g.y(j) - cy);
      const double wgt = std::clamp((rho - d) / hbar + 0.5, 0.0, 1.0);
      if (wgt == 0.0) continue;
      const double gx = grad.dx(i, j), gy = grad.dy(i, j);
      e += wgt * (gx * gx + gy * gy) * g.hx() * g.hy();
    }
  }
  return e;
}

PositivityRow positivity_harnack_case(const MatrixField& a, const ScalarField& q,
                                      const BoundaryTrace& f, double band_delta) {
  SolveOptions opts;
  opts.tol = 1e-12;
  const auto [u, stats] = solve(a, q, f, opts);
  PositivityRow row;
  row.eps_hat = min_value(u);

  const BoundaryBands band(u.grid(), band_delta);
  double bmin = std::numeric_limits<double>::infinity();
  for (int id : band.band) bmin = std::min(bmin, u.at_node(id));
  row.band_min = bmin;

  const BoundaryBands half(u.grid(), band_delta / 2.0);
  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  for (int id : half.core) {
    cmin = std::min(cmin, u.at_node(id));
    cmax = std::max(cmax, u.at_node(id));
  }
  row.harnack_ratio = cmax / cmin;
  return row;
}

StabilityReport lipschitz_ratio_j(int j, const ExperimentPlan& plan) {
  if (j != 1 && j != 2) throw ConfigError("lipschitz ratio: j must be 1 or 2");
  const Grid& g = plan.grid;
  const MatrixField eye = MatrixField::identity(g);
  const BoundaryTrace f = make_illumination(g, plan.illumination);
  if (!(f.min() > 0.0)) throw ConfigError("lipschitz ratio needs f > 0");

  const std::vector<double> ladder = plan.ladder.values();
  const double delta = estimate_delta(eye, ScalarField(g, 0.0));
  if (!(ladder.front() <= 0.9 * delta)) {
    throw ConfigError("perturbation ladder exceeds 0.9 of the radius estimate");
  }

  StabilityReport rep;
  rep.experiment = j == 1 ? "lip_j1" : "lip_j2";
  add_common_fingerprint(rep, plan);
  rep.fingerprint.emplace_back("delta_est", format_double(delta));
  rep.fingerprint.emplace_back("flatness_margin", format_double(kFlatnessMargin));
  rep.fingerprint.emplace_back("slope_margin", format_double(kSlopeMargin));
  rep.columns = {"sample", "scale_index", "t", "num_linf", "den_linf", "ratio"};

  SolveOptions sopts;
  sopts.tol = 1e-12;
  const DataKind kind = j == 1 ? DataKind::qu : DataKind::qu2;
  const ScalarField h_base =
      synthesize(kind, eye, ScalarField(g, 0.0),
                 solve(eye, ScalarField(g, 0.0), f, sopts).first);

  struct SampleOut {
    std::vector<std::vector<double>> rows;
    double flatness = 0.0;
    double slope = 1.0;
    bool failed = false;
  };
  std::vector<SampleOut> out(static_cast<std::size_t>(plan.samples));
  const double nan = std::numeric_limits<double>::quiet_NaN();

  run_indexed(plan.samples, plan.jobs, [&](int s) {
    try {
      const ScalarField bump = tapered_bump(g, plan.seed + 1000 + s, false);
      std::vector<double> log_t, log_ratio, log_num, log_den;
      for (std::size_t k = 0; k < ladder.size(); ++k) {
        const double t = ladder[k];
        ScalarField q_tilde(g);
        for (std::size_t m = 0; m < q_tilde.values().size(); ++m) {
          q_tilde.values()[m] = t * bump.values()[m];
        }
        const ScalarField u_tilde = solve(eye, q_tilde, f, sopts).first;
        const ScalarField h_tilde = synthesize(kind, eye, q_tilde, u_tilde);
        const double num = max_abs(q_tilde);
        const double den = norm_linf_diff(h_tilde, h_base);
        const double ratio = num / den;
        out[s].rows.push_back({double(s), double(k), t, num, den, ratio});
        log_t.push_back(std::log(t));
        log_num.push_back(std::log(num));
        log_den.push_back(std::log(den));
        log_ratio.push_back(std::log(ratio));
      }
      out[s].flatness = linear_fit(log_t, log_ratio).slope;
      out[s].slope = linear_fit(log_den, log_num).slope;
    } catch (const SolverError&) {
      out[s].failed = true;
      out[s].rows = {{double(s), nan, nan, nan, nan, nan}};
    }
  });

  double c_hat = 0.0, worst_flat = 0.0, slope_lo = 1e300, slope_hi = -1e300;
  int failures = 0;
  for (const SampleOut& so : out) {
    for (const auto& row : so.rows) rep.rows.push_back(row);
    if (so.failed) {
      ++failures;
      continue;
    }
    for (const auto& row : so.rows) c_hat = std::max(c_hat, row[5]);
    worst_flat = std::max(worst_flat, std::abs(so.flatness));
    slope_lo = std::min(slope_lo, so.slope);
    slope_hi = std::max(slope_hi, so.slope);
  }

  rep.summary.emplace_back("C_hat", c_hat);
  rep.summary.emplace_back("worst_flatness", worst_flat);
  rep.summary.emplace_back("slope_min", slope_lo);
  rep.summary.emplace_back("slope_max", slope_hi);
  rep.summary.emplace_back("sample_failures", failures);
  add_criterion(rep, "max ratio finite", c_hat, "finite", 0.0);
  add_criterion(rep, "log-ratio flatness", worst_flat, "<=", kFlatnessMargin);
  add_criterion(rep, "num-den slope lower", slope_lo, ">=", 1.0 - kSlopeMargin);
  add_criterion(rep, "num-den slope upper", slope_hi, "<=", 1.0 + kSlopeMargin);
  add_criterion(rep, "sample solver failures", failures, "<=", 0.0);
  return rep;
}

StabilityReport certify_mt3_constant(const ExperimentPlan& plan) {
  const Grid& g = plan.grid;
  const double mu = plan.cls.mu;
  const double q_low = plan.cls.q_low.value_or(0.5);
  const double q_high = plan.cls.q_high.value_or(1.0);
  const BoundaryTrace f = make_illumination(g, plan.illumination);
  const double m = f.min();
  if (!(m > 0.0)) throw ConfigError("mt3 needs essinf f > 0");
  if (plan.cls.min_illumination && m < *plan.cls.min_illumination) {
    throw ConfigError("illumination sits below the class minimum");
  }
  const double lambda1 = first_dirichlet_eigenvalue(g);
  if (!(0.0 < q_low && q_low < q_high && q_high < lambda1 / mu)) {
    throw ConfigError("mt3 class violation: need 0 < low < high < lambda1/mu");
  }

  // Explicit constants from the proof chain, with the discrete eigenvalue.
  const double k5 = 2.0 * std::sqrt(q_high) * mu / (lambda1 - mu * q_high);
  const double c6u = q_high / (std::sqrt(q_low) * m);
  const double c6v = std::sqrt(q_high) / (std::sqrt(q_low) * m);
  const double chain = c6u * k5 + c6v;
  const double k_theory = (std::sqrt(q_high) / (std::sqrt(q_low) * m)) * chain;

  StabilityReport rep;
  rep.experiment = "mt3";
  add_common_fingerprint(rep, plan);
  rep.fingerprint.emplace_back("mu", format_double(mu));
  rep.fingerprint.emplace_back("q_low", format_double(q_low));
  rep.fingerprint.emplace_back("q_high", format_double(q_high));
  rep.fingerprint.emplace_back("m", format_double(m));
  rep.fingerprint.emplace_back("lambda1_discrete", format_double(lambda1));
  rep.fingerprint.emplace_back("K_theory", format_double(k_theory));
  rep.columns = {"pair",    "K_theory",   "l2_q_diff",  "l2_data_diff",
                 "l2_u_diff", "l2_sqrtv_diff", "l2_sqrtq_diff", "bound_main",
                 "bound_link5", "bound_link6", "ok_main", "ok_link5",
                 "ok_link6", "identity_lhs", "identity_rhs", "identity_gap"};

  const MatrixField eye = MatrixField::identity(g);
  SolveOptions sopts;
  sopts.tol = 1e-12;

  std::vector<std::vector<double>> rows(static_cast<std::size_t>(plan.samples));
  run_indexed(plan.samples, plan.jobs, [&](int p) {
    const ScalarField q = sampled_window_field(g, plan.seed + 2 * p, q_low, q_high);
    const ScalarField qt =
        sampled_window_field(g, plan.seed + 2 * p + 1, q_low, q_high);
    const ScalarField u = solve(eye, q, f, sopts).first;
    const ScalarField ut = solve(eye, qt, f, sopts).first;

    ScalarField v(g), vt(g), sv(g), svt(g), sq(g), sqt(g);
    for (std::size_t k = 0; k < v.values().size(); ++k) {
      v.values()[k] = q.values()[k] * u.values()[k] * u.values()[k];
      vt.values()[k] = qt.values()[k] * ut.values()[k] * ut.values()[k];
      sv.values()[k] = std::sqrt(v.values()[k]);
      svt.values()[k] = std::sqrt(vt.values()[k]);
      sq.values()[k] = std::sqrt(q.values()[k]);
      sqt.values()[k] = std::sqrt(qt.values()[k]);
    }
    const double nq = norm_l2_diff(q, qt);
    const double nv = norm_l2_diff(v, vt);
    const double nu = norm_l2_diff(u, ut);
    const double nsv = norm_l2_diff(sv, svt);
    const double nsq = norm_l2_diff(sq, sqt);

    // Equality behind the chain: face energy of u - ũ minus the geometric-
    // mean potential term equals the weighted data-difference pairing; exact
    // for discrete solutions up to solver residuals.
    ScalarField w(g);
    for (std::size_t k = 0; k < w.values().size(); ++k) {
      w.values()[k] = u.values()[k] - ut.values()[k];
    }
    double face_energy = 0.0;
    for (int jj = 0; jj < g.ny(); ++jj) {
      for (int ii = 0; ii + 1 < g.nx(); ++ii) {
        const double d = (w(ii + 1, jj) - w(ii, jj)) / g.hx();
        face_energy += d * d * g.hx() * g.hy();
      }
    }
    for (int jj = 0; jj + 1 < g.ny(); ++jj) {
      for (int ii = 0; ii < g.nx(); ++ii) {
        const double d = (w(ii, jj + 1) - w(ii, jj)) / g.hy();
        face_energy += d * d * g.hx() * g.hy();
      }
    }
    double lhs = face_energy, rhs = 0.0;
    const double cell = g.hx() * g.hy();
    for (int jj = 1; jj < g.ny() - 1; ++jj) {
      for (int ii = 1; ii < g.nx() - 1; ++ii) {
        lhs -= cell * std::sqrt(q(ii, jj) * qt(ii, jj)) * w(ii, jj) * w(ii, jj);
        rhs += cell * (sq(ii, jj) + sqt(ii, jj)) *
               (svt(ii, jj) - sv(ii, jj)) * w(ii, jj);
      }
    }
    const double gap =
        std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});

    const double bound_main = k_theory * nv;
    const double bound5 = k5 * nsv;
    const double bound6 = c6u * nu + c6v * nsv;
    rows[p] = {double(p), k_theory, nq,     nv,     nu,
               nsv,       nsq,      bound_main, bound5,
               bound6,    nq <= bound_main ? 1.0 : 0.0,
               nu <= bound5 ? 1.0 : 0.0, nsq <= bound6 ? 1.0 : 0.0,
               lhs,       rhs,      gap};
  });

  int viol_main = 0, viol5 = 0, viol6 = 0;
  double worst_ratio = 0.0, gap_max = 0.0;
  for (auto& row : rows) {
    if (row[10] == 0.0) ++viol_main;
    if (row[11] == 0.0) ++viol5;
    if (row[12] == 0.0) ++viol6;
    if (row[3] > 0.0) worst_ratio = std::max(worst_ratio, row[2] / row[3]);
    gap_max = std::max(gap_max, row[15]);
    rep.rows.push_back(std::move(row));
  }

  rep.summary.emplace_back("K_theory", k_theory);
  rep.summary.emplace_back("lambda1", lambda1);
  rep.summary.emplace_back("max_ratio", worst_ratio);
  rep.summary.emplace_back("identity_gap_max", gap_max);
  add_criterion(rep, "main inequality violations", viol_main, "<=", 0.0);
  add_criterion(rep, "link mt3-5 violations", viol5, "<=", 0.0);
  add_criterion(rep, "link mt3-6 violations", viol6, "<=", 0.0);
  add_criterion(rep, "energy identity gap", gap_max, "<=", kIdentityGapMax);
  return rep;
}

namespace {

struct HolderFitResult {
  std::vector<std::vector<double>> rows;
  double slope = 0.0, r2 = 0.0, aux_slope = 0.0, worst_gap = 0.0;
  double slope_ci95 = 0.0;
};

}  // namespace

StabilityReport holder_fit_hs1(const ExperimentPlan& plan) {
  const Grid& g = plan.grid;
  const double q_minus = plan.cls.q_minus.value_or(1.0);
  const double q_plus = plan.cls.q_plus.value_or(5.0);
  const double rho_cap = plan.cls.lipschitz_bound.value_or(50.0);
  const BoundaryTrace f = make_illumination(g, plan.illumination);
  if (!(f.min() > 0.0)) throw ConfigError("hs1 needs f > 0");
  const std::vector<double> ladder = plan.ladder.values();
  if (ladder.size() < 3) throw ConfigError("exponent fits need >= 3 ladder points");

  // Base sits in the upper part of the window; the ladder pushes downward,
  // so every perturbed coefficient stays inside [-q_plus, -q_minus].
  const double base = -(q_minus + 0.25 * (q_plus - q_minus));
  if (ladder.front() > 0.5 * (q_plus - q_minus)) {
    throw ConfigError("ladder would leave the coefficient window");
  }

  StabilityReport rep;
  rep.experiment = "hs1";
  add_common_fingerprint(rep, plan);
  rep.fingerprint.emplace_back("q_minus", format_double(q_minus));
  rep.fingerprint.emplace_back("q_plus", format_double(q_plus));
  rep.fingerprint.emplace_back(
      "noise", plan.noise.model == NoiseSpec::Model::none
                   ? "none"
                   : format_double(plan.noise.level) + " seed " +
                         std::to_string(plan.noise.seed));
  rep.fingerprint.emplace_back("lipschitz_cap", format_double(rho_cap));
  rep.fingerprint.emplace_back("r2_min", format_double(kR2Min));
  rep.fingerprint.emplace_back("aux_slope_min", format_double(1.0 / 3.0 - kSlopeMargin));
  rep.columns = {"sample", "scale_index", "t", "u_diff_l2", "q_diff_linf",
                 "weighted_diff_l2"};

  const MatrixField eye = MatrixField::identity(g);
  const ScalarField q_base(g, base);
  SolveOptions sopts;
  sopts.tol = 1e-12;
  const ScalarField u = add_noise(solve(eye, q_base, f, sopts).first, plan.noise);

  std::vector<HolderFitResult> out(static_cast<std::size_t>(plan.samples));
  run_indexed(plan.samples, plan.jobs, [&](int s) {
    const ScalarField bump = tapered_bump(g, plan.seed + 500 + s, true);
    std::vector<double> xs, ys, zs;
    for (std::size_t k = 0; k < ladder.size(); ++k) {
      const double t = ladder[k];
      ScalarField q_tilde(g);
      for (std::size_t mId = 0; mId < q_tilde.values().size(); ++mId) {
        q_tilde.values()[mId] = q_base.values()[mId] + t * bump.values()[mId];
      }
      const ScalarField u_tilde =
          add_noise(solve(eye, q_tilde, f, sopts).first, plan.noise);
      const double den = norm_l2_diff(u, u_tilde);
      const double num = norm_linf_diff(q_base, q_tilde);
      ScalarField weighted(g);
      for (std::size_t mId = 0; mId < weighted.values().size(); ++mId) {
        weighted.values()[mId] =
            (q_base.values()[mId] - q_tilde.values()[mId]) * u.values()[mId];
      }
      const double aux = norm_l2(weighted);
      out[s].rows.push_back({double(s), double(k), t, den, num, aux});
      xs.push_back(std::log(den));
      ys.push_back(std::log(num));
      zs.push_back(std::log(aux));
    }
    const LinearFit fit = linear_fit(xs, ys);
    out[s].slope = fit.slope;
    out[s].r2 = fit.r2;
    out[s].slope_ci95 = fit.slope_ci95;
    out[s].aux_slope = linear_fit(xs, zs).slope;
  });

  double slope_lo = 1e300, slope_hi = -1e300, r2_min = 1.0, aux_min = 1e300;
  double ci_max = 0.0;
  for (const HolderFitResult& so : out) {
    for (const auto& row : so.rows) rep.rows.push_back(row);
    slope_lo = std::min(slope_lo, so.slope);
    slope_hi = std::max(slope_hi, so.slope);
    r2_min = std::min(r2_min, so.r2);
    aux_min = std::min(aux_min, so.aux_slope);
    ci_max = std::max(ci_max, so.slope_ci95);
  }

  rep.summary.emplace_back("slope_min", slope_lo);
  rep.summary.emplace_back("slope_max", slope_hi);
  rep.summary.emplace_back("slope_ci95_max", ci_max);
  rep.summary.emplace_back("r2_min", r2_min);
  rep.summary.emplace_back("aux_slope_min", aux_min);
  add_criterion(rep, "fitted slope > 0", slope_lo, ">", 0.0);
  add_criterion(rep, "fitted slope <= 1", slope_hi, "<=", 1.0);
  add_criterion(rep, "fit quality R2", r2_min, ">=", kR2Min);
  add_criterion(rep, "weighted-difference slope", aux_min, ">=",
                1.0 / 3.0 - kSlopeMargin);
  return rep;
}

StabilityReport holder_fit_hs3(const ExperimentPlan& plan) {
  const Grid& g = plan.grid;
  const double mu = std::max(plan.cls.mu, 2.0);
  const double q_level = plan.cls.lambda > 0.0 ? -0.5 * plan.cls.lambda : -1.0;
  // hs3 needs a non-constant trace; swap the generic constant default out.
  const IlluminationSpec f_spec = plan.illumination.kind == "const"
                                      ? IlluminationSpec{"bilinear", 0.0}
                                      : plan.illumination;
  const BoundaryTrace f = make_illumination(g, f_spec);
  if (!(f.max() - f.min() > 1e-12)) throw ConfigError("hs3 needs a non-constant f");
  const std::vector<double> ladder = plan.ladder.values();
  if (ladder.size() < 3) throw ConfigError("exponent fits need >= 3 ladder points");
  if (!(1.0 - ladder.front() > 1.0 / mu)) {
    throw ConfigError("ladder would push the diffusion below 1/mu");
  }

  StabilityReport rep;
  rep.experiment = "hs3";
  add_common_fingerprint(rep, plan);
  rep.fingerprint.emplace_back("mu", format_double(mu));
  rep.fingerprint.emplace_back("q_level", format_double(q_level));
  rep.fingerprint.emplace_back("omega_margin", format_double(plan.omega_margin));
  rep.fingerprint.emplace_back("identity_gap_max", format_double(kIdentityGapMax));
  rep.fingerprint.emplace_back("r2_min", format_double(kR2Min));
  rep.columns = {"sample", "scale_index", "t",  "u_diff_l2",
                 "a_diff_c_omega", "identity_lhs", "identity_rhs", "identity_gap"};

  const ScalarField q(g, q_level);
  const ScalarField a_base(g, 1.0);
  SolveOptions sopts;
  sopts.tol = 1e-12;
  const ScalarField u = solve(MatrixField::isotropic(a_base), q, f, sopts).first;
  const GradientField grad_u = gradient(u);
  const std::vector<int> omega = interior_nodes_with_margin(g, plan.omega_margin);

  std::vector<HolderFitResult> out(static_cast<std::size_t>(plan.samples));
  run_indexed(plan.samples, plan.jobs, [&](int s) {
    const ScalarField bump = tapered_bump(g, plan.seed + 700 + s, true);
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < ladder.size(); ++k) {
      const double t = ladder[k];
      ScalarField a_tilde(g);
      for (std::size_t mId = 0; mId < a_tilde.values().size(); ++mId) {
        a_tilde.values()[mId] = a_base.values()[mId] + t * bump.values()[mId];
      }
      const ScalarField u_tilde =
          solve(MatrixField::isotropic(a_tilde), q, f, sopts).first;
      const double den = norm_l2_diff(u, u_tilde);

      ScalarField diff_a(g);
      for (std::size_t mId = 0; mId < diff_a.values().size(); ++mId) {
        diff_a.values()[mId] = a_base.values()[mId] - a_tilde.values()[mId];
      }
      const double num = max_abs_on(diff_a, omega);

      // Interior energy identity: ∫|a-ã||∇u|² against the transported form.
      double lhs = 0.0;
      for (int jj = 0; jj < g.ny(); ++jj) {
        for (int ii = 0; ii < g.nx(); ++ii) {
          const double gx = grad_u.dx(ii, jj), gy = grad_u.dy(ii, jj);
          lhs += quad_weight(g, ii, jj) * std::abs(diff_a(ii, jj)) *
                 (gx * gx + gy * gy);
        }
      }
      ScalarField u_minus_ut(g);
      for (std::size_t mId = 0; mId < u_minus_ut.values().size(); ++mId) {
        u_minus_ut.values()[mId] = u.values()[mId] - u_tilde.values()[mId];
      }
      const ScalarField flux = divergence_a_grad(a_tilde, u_minus_ut);
      double rhs = 0.0;
      for (int jj = 1; jj < g.ny() - 1; ++jj) {
        for (int ii = 1; ii < g.nx() - 1; ++ii) {
          const double sgn =
              diff_a(ii, jj) > 0.0 ? 1.0 : (diff_a(ii, jj) < 0.0 ? -1.0 : 0.0);
          if (sgn == 0.0) continue;
          const double bracket =
              q(ii, jj) * (u_tilde(ii, jj) - u(ii, jj)) + flux(ii, jj);
          rhs += quad_weight(g, ii, jj) * sgn * bracket * u(ii, jj);
        }
      }
      const double gap =
          std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
      out[s].rows.push_back({double(s), double(k), t, den, num, lhs, rhs, gap});
      out[s].worst_gap = std::max(out[s].worst_gap, gap);
      xs.push_back(std::log(den));
      ys.push_back(std::log(num));
    }
    const LinearFit fit = linear_fit(xs, ys);
    out[s].slope = fit.slope;
    out[s].r2 = fit.r2;
    out[s].slope_ci95 = fit.slope_ci95;
  });

  double slope_lo = 1e300, slope_hi = -1e300, r2_min = 1.0, gap_max = 0.0;
  double ci_max = 0.0;
  for (const HolderFitResult& so : out) {
    for (const auto& row : so.rows) rep.rows.push_back(row);
    slope_lo = std::min(slope_lo, so.slope);
    slope_hi = std::max(slope_hi, so.slope);
    r2_min = std::min(r2_min, so.r2);
    gap_max = std::max(gap_max, so.worst_gap);
    ci_max = std::max(ci_max, so.slope_ci95);
  }

  rep.summary.emplace_back("slope_min", slope_lo);
  rep.summary.emplace_back("slope_max", slope_hi);
  rep.summary.emplace_back("slope_ci95_max", ci_max);
  rep.summary.emplace_back("r2_min", r2_min);
  rep.summary.emplace_back("identity_gap_max", gap_max);
  add_criterion(rep, "fitted slope > 0", slope_lo, ">", 0.0);
  add_criterion(rep, "fitted slope <= 1", slope_hi, "<=", 1.0);
  add_criterion(rep, "fit quality R2", r2_min, ">=", kR2Min);
  add_criterion(rep, "energy identity gap", gap_max, "<=", kIdentityGapMax);
  return rep;
}

StabilityReport gradient_lower_bound_scan(const ExperimentPlan& plan) {
  const Grid& g = plan.grid;
  const BoundaryTrace phi = make_illumination(g, plan.illumination);
  if (!(phi.max() - phi.min() > 1e-12)) {
    throw ConfigError("boundary gradient scan requires a non-constant trace");
  }

  StabilityReport rep;
  rep.experiment = "glb";
  add_common_fingerprint(rep, plan);
  rep.fingerprint.emplace_back("sigma_window",
                               "[" + format_double(plan.sigma_lo) + "," +
                                   format_double(plan.sigma_hi) + "]");
  rep.fingerprint.emplace_back("eta_min", format_double(plan.eta_min));
  rep.columns = {"sample", "eta"};

  SolveOptions sopts;
  sopts.tol = 1e-12;
  const ScalarField zero_q(g, 0.0);

  double eta_ref = std::numeric_limits<double>::quiet_NaN();
  if (plan.include_reference) {
    const ScalarField sigma(g, 1.0);
    const ScalarField u =
        solve(MatrixField::isotropic(sigma), zero_q, phi, sopts).first;
    eta_ref = min_boundary_gradient(u);
    rep.rows.push_back({-1.0, eta_ref});
  }

  std::vector<double> etas(static_cast<std::size_t>(plan.samples), 0.0);
  run_indexed(plan.samples, plan.jobs, [&](int s) {
    try {
      const ScalarField sigma = sampled_window_field(
          g, plan.seed + 300 + s, plan.sigma_lo, plan.sigma_hi);
      const ScalarField u =
          solve(MatrixField::isotropic(sigma), zero_q, phi, sopts).first;
      etas[s] = min_boundary_gradient(u);
    } catch (const SolverError&) {
      etas[s] = std::numeric_limits<double>::quiet_NaN();
    }
  });

  double eta_hat = std::numeric_limits<double>::infinity();
  double eta_max = 0.0;
  int failures = 0;
  for (int s = 0; s < plan.samples; ++s) {
    rep.rows.push_back({double(s), etas[s]});
    if (std::isnan(etas[s])) {
      ++failures;
      continue;
    }
    eta_hat = std::min(eta_hat, etas[s]);
    eta_max = std::max(eta_max, etas[s]);
  }

  rep.summary.emplace_back("eta_hat", eta_hat);
  rep.summary.emplace_back("eta_spread", eta_max / eta_hat - 1.0);
  rep.summary.emplace_back("sample_failures", failures);
  if (plan.include_reference) rep.summary.emplace_back("eta_reference", eta_ref);
  add_criterion(rep, "boundary gradient floor", eta_hat, ">=", plan.eta_min);
  add_criterion(rep, "sample solver failures", failures, "<=", 0.0);
  if (plan.include_reference) {
    add_criterion(rep, "reference deviation from 1", std::abs(eta_ref - 1.0),
                  "<=", 1e-6);
  }
  return rep;
}

StabilityReport positivity_harnack_check(const ExperimentPlan& plan) {
  const Grid& g = plan.grid;
  const BoundaryTrace f = make_illumination(g, plan.illumination);
  const double m = f.min();
  if (!(m > 0.0)) throw ConfigError("positivity check needs min f > 0");
  const double kappa = plan.cls.coeff_floor.value_or(0.5);

  StabilityReport rep;
  rep.experiment = "pos";
  add_common_fingerprint(rep, plan);
  rep.fingerprint.emplace_back("band_delta", format_double(plan.band_delta));
  rep.fingerprint.emplace_back("m", format_double(m));
  rep.fingerprint.emplace_back("kappa", format_double(kappa));
  rep.columns = {"case", "eps_hat", "band_min", "harnack_ratio"};

  struct Case {
    ScalarField a;
    ScalarField q;
  };
  std::vector<Case> cases;
  cases.push_back({ScalarField(g, 1.0), ScalarField(g, 0.0)});
  cases.push_back({ScalarField(g, 1.0), ScalarField(g, 1.0)});
  for (int s = 0; s < plan.samples; ++s) {
    cases.push_back({sampled_window_field(g, plan.seed + 40 + s,
                                          std::max(kappa, 0.75), 1.5),
                     sampled_window_field(g, plan.seed + 80 + s, 0.0, 1.5)});
  }

  std::vector<PositivityRow> rows(cases.size());
  run_indexed(static_cast<int>(cases.size()), plan.jobs, [&](int c) {
    rows[c] = positivity_harnack_case(MatrixField::isotropic(cases[c].a),
                                      cases[c].q, f, plan.band_delta);
  });

  double eps_min = 1e300, band_min = 1e300, harnack_max = 0.0;
  for (std::size_t c = 0; c < rows.size(); ++c) {
    rep.rows.push_back({double(c), rows[c].eps_hat, rows[c].band_min,
                        rows[c].harnack_ratio});
    eps_min = std::min(eps_min, rows[c].eps_hat);
    band_min = std::min(band_min, rows[c].band_min);
    harnack_max = std::max(harnack_max, rows[c].harnack_ratio);
  }

  rep.summary.emplace_back("eps_hat_min", eps_min);
  rep.summary.emplace_back("band_min", band_min);
  rep.summary.emplace_back("harnack_max", harnack_max);
  add_criterion(rep, "positivity everywhere", eps_min, ">", 0.0);
  add_criterion(rep, "band minimum >= m/2", band_min, ">=", m / 2.0);
  add_criterion(rep, "harnack ratio finite", harnack_max, "finite", 0.0);
  return rep;
}

StabilityReport interpolation_checks(const ExperimentPlan& plan) {
  const Grid& g = plan.grid;
  const int n2 = plan.grid2 > 0 ? plan.grid2 : (g.nx() - 1) / 2 + 1;
  const Grid g2(n2, n2);
  const double q_minus = plan.cls.q_minus.value_or(1.0);
  const double q_plus = plan.cls.q_plus.value_or(5.0);
  const double beta = plan.cls.holder_beta.value_or(0.5);
  const BoundaryTrace f = make_illumination(g, plan.illumination);
  if (!(f.min() > 0.0)) throw ConfigError("interpolation weights need f > 0");

  StabilityReport rep;
  rep.experiment = "interp";
  add_common_fingerprint(rep, plan);
  rep.fingerprint.emplace_back("grid2", std::to_string(n2) + "x" + std::to_string(n2));
  rep.fingerprint.emplace_back("beta", format_double(beta));
  rep.fingerprint.emplace_back("stability_max", format_double(0.25));
  rep.columns = {"section", "sample", "grid_n",  "mu",        "l2_norm",
                 "h2_norm", "h3_norm", "sobolev_ratio", "linf", "holder_norm",
                 "weighted_l1", "weighted_ratio"};

  const double nan = std::numeric_limits<double>::quiet_NaN();
  SolveOptions sopts;
  sopts.tol = 1e-12;

  auto weight_field = [&](const Grid& grid, std::uint64_t seed) {
    const ScalarField q =
        sampled_window_field(grid, seed, -q_plus, -q_minus);
    const ScalarField u =
        solve(MatrixField::identity(grid), q,
              make_illumination(grid, plan.illumination), sopts).first;
    ScalarField w(grid);
    for (std::size_t k = 0; k < w.values().size(); ++k) {
      w.values()[k] = u.values()[k] * u.values()[k];
    }
    return w;
  };

  double c_hat_main = 0.0, c_hat_coarse = 0.0;
  std::vector<ScalarField> weights_main;
  for (int s = 0; s < plan.samples; ++s) {
    const std::uint64_t seed = plan.seed + 600 + s;
    for (const Grid* grid : {&g, &g2}) {
      const ScalarField w = weight_field(*grid, seed);
      const NormBundle nb = norms(w, beta);
      const double ratio =
          nb.h2 / (std::pow(nb.h3, 2.0 / 3.0) * std::pow(nb.l2, 1.0 / 3.0));
      rep.rows.push_back({0.0, double(s), double(grid->nx()), nan, nb.l2, nb.h2,
                          nb.h3, ratio, nan, nan, nan, nan});
      if (grid == &g) {
        c_hat_main = std::max(c_hat_main, ratio);
        weights_main.push_back(w);
      } else {
        c_hat_coarse = std::max(c_hat_coarse, ratio);
      }
    }
  }
  const double stability =
      std::abs(c_hat_main - c_hat_coarse) / std::max(c_hat_coarse, 1e-300);

  // Weighted interpolation: grid-search the exponent that certifies the
  // whole family with one constant.
  std::vector<ScalarField> phis;
  for (int s = 0; s < plan.samples; ++s) {
    phis.push_back(sampled_window_field(g, plan.seed + 900 + s, -2.0, 2.0));
  }
  bool degenerate = true;
  for (const ScalarField& phi : phis) {
    if (max_value(phi) - min_value(phi) > 1e-12) degenerate = false;
  }
  if (degenerate) throw ConfigError("interpolation family is degenerate");

  double best_mu = 0.0, best_c = std::numeric_limits<double>::infinity();
  for (int mi = 0; mi < 9; ++mi) {
    const double mu_exp = 0.1 * (mi + 1);
    double worst = 0.0;
    for (int s = 0; s < plan.samples; ++s) {
      const ScalarField& phi = phis[s];
      const ScalarField& w = weights_main[s];
      ScalarField pw(g);
      for (std::size_t k = 0; k < pw.values().size(); ++k) {
        pw.values()[k] = phi.values()[k] * w.values()[k];
      }
      const double linf = norm_linf(phi);
      const double holder_norm = linf + holder_seminorm(phi, beta);
      const double l1 = norm_l1(pw);
      const double ratio =
          linf / (std::pow(holder_norm, 1.0 - mu_exp) * std::pow(l1, mu_exp));
      worst = std::max(worst, ratio);
    }
    if (worst < best_c) {
      best_c = worst;
      best_mu = mu_exp;
    }
  }
  for (int s = 0; s < plan.samples; ++s) {
    const ScalarField& phi = phis[s];
    const ScalarField& w = weights_main[s];
    ScalarField pw(g);
    for (std::size_t k = 0; k < pw.values().size(); ++k) {
      pw.values()[k] = phi.values()[k] * w.values()[k];
    }
    const double linf = norm_linf(phi);
    const double holder_norm = linf + holder_seminorm(phi, beta);
    const double l1 = norm_l1(pw);
    const double ratio =
        linf / (std::pow(holder_norm, 1.0 - best_mu) * std::pow(l1, best_mu));
    rep.rows.push_back({1.0, double(s), double(g.nx()), best_mu, nan, nan, nan,
                        nan, linf, holder_norm, l1, ratio});
  }

  rep.summary.emplace_back("sobolev_c_hat", c_hat_main);
  rep.summary.emplace_back("sobolev_c_hat_coarse", c_hat_coarse);
  rep.summary.emplace_back("sobolev_stability", stability);
  rep.summary.emplace_back("weighted_c_hat", best_c);
  rep.summary.emplace_back("weighted_mu_hat", best_mu);
  add_criterion(rep, "sobolev ratio finite", c_hat_main, "finite", 0.0);
  add_criterion(rep, "sobolev cross-grid stability", stability, "<=", 0.25);
  add_criterion(rep, "weighted constant finite", best_c, "finite", 0.0);
  return rep;
}

StabilityReport vanishing_order_scan(const ExperimentPlan& plan) {
  const Grid& g = plan.grid;
  std::vector<std::pair<double, double>> centers = plan.centers;
  if (centers.empty()) {
    centers = {{0.5, 0.5}, {0.35, 0.35}, {0.65, 0.35}, {0.35, 0.65}, {0.65, 0.65}};
  }
  std::vector<double> radii = plan.radii;
  if (radii.empty()) radii = {0.08, 0.12, 0.18, 0.26};
  if (radii.size() < 3) throw ConfigError("vanishing scan needs >= 3 radii");

  // Quotient of two loads over a sampled admissible pair.
  SolveOptions sopts;
  sopts.tol = 1e-12;
  const ScalarField a = sampled_window_field(g, plan.seed + 11, 0.75, 1.5);
  const ScalarField q = sampled_window_field(g, plan.seed + 12, 0.0, 1.5);
  const MatrixField a_mat = MatrixField::isotropic(a);
  const ScalarField u1 =
      solve(a_mat, q, make_illumination(g, plan.illumination), sopts).first;
  const ScalarField u2 =
      solve(a_mat, q, make_illumination(g, plan.illumination2), sopts).first;
  const QuotientData quo = quotient_transform(u1, u2, a);
  const ScalarField& w = quo.ratio;
  if (!(max_value(w) - min_value(w) > 1e-12)) {
    throw ConfigError("vanishing scan: quotient is constant");
  }

  StabilityReport rep;
  rep.experiment = "vanish";
  add_common_fingerprint(rep, plan);
  rep.fingerprint.emplace_back("quotient_residual", format_double(quo.residual_inf));
  rep.columns = {"center", "center_x", "center_y", "rho", "energy", "clipped"};

  double upsilon_min = 1e300, upsilon_max = -1e300, energy_min = 1e300;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const auto [cx, cy] = centers[c];
    const double dist = std::min({cx, 1.0 - cx, cy, 1.0 - cy});
    std::vector<double> log_r, log_e;
    for (double rho : radii) {
      double r_eff = rho;
      double clipped = 0.0;
      if (r_eff > dist) {
        r_eff = dist;
        clipped = 1.0;
      }
      const double e = gradient_ball_energy(w, cx, cy, r_eff);
      rep.rows.push_back({double(c), cx, cy, r_eff, e, clipped});
      if (e > 0.0) {
        log_r.push_back(std::log(r_eff));
        log_e.push_back(std::log(e));
        energy_min = std::min(energy_min, e);
      }
    }
    if (log_r.size() < 3) throw ConfigError("vanishing scan: degenerate energies");
    const double upsilon = linear_fit(log_r, log_e).slope;
    rep.summary.emplace_back("upsilon_" + std::to_string(c), upsilon);
    upsilon_min = std::min(upsilon_min, upsilon);
    upsilon_max = std::max(upsilon_max, upsilon);
  }

  rep.summary.emplace_back("upsilon_min", upsilon_min);
  rep.summary.emplace_back("upsilon_max", upsilon_max);
  rep.summary.emplace_back("energy_min", energy_min);
  add_criterion(rep, "orders finite", std::abs(upsilon_max), "finite", 0.0);
  add_criterion(rep, "ball energies positive", energy_min, ">", 0.0);
  return rep;
}

StabilityReport contraction_audit(const ExperimentPlan& plan) {
  const Grid& g = plan.grid;
  const MatrixField eye = MatrixField::identity(g);
  const ScalarField zero(g, 0.0);
  const BoundaryTrace f = make_illumination(g, plan.illumination);

  const double delta = estimate_delta(eye, zero);
  const double base_norm = estimate_operator_norm_inverse(eye, zero);
  std::vector<double> fracs = plan.magnitudes;
  if (fracs.empty()) fracs = {0.1, 0.5, 0.9};
  if (plan.include_out_of_hypothesis) fracs.push_back(2.0);

  StabilityReport rep;
  rep.experiment = "contract";
  add_common_fingerprint(rep, plan);
  rep.fingerprint.emplace_back("delta_est", format_double(delta));
  rep.fingerprint.emplace_back("base_inv_norm", format_double(base_norm));
  rep.fingerprint.emplace_back("contraction_margin", format_double(kContractionMargin));
  rep.fingerprint.emplace_back("inv_norm_factor", format_double(kInvNormFactor));
  rep.columns = {"magnitude_frac", "profile", "max_rho", "iterations",
                 "converged", "inv_norm_ratio", "in_hypothesis"};

  const ScalarField bump = tapered_bump(g, plan.seed + 1, false);
  double rho_in_max = 0.0, inv_ratio_max = 0.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (double frac : fracs) {
    const bool in_hyp = frac <= 0.9;
    for (int profile = 0; profile < 2; ++profile) {
      ScalarField q_pert(g, frac * delta);
      if (profile == 1) {
        for (std::size_t k = 0; k < q_pert.values().size(); ++k) {
          q_pert.values()[k] = frac * delta * bump.values()[k];
        }
      }
      double max_rho = 0.0, iters = 0.0, converged = 0.0, inv_ratio = nan;
      try {
        PerturbOptions popts;
        popts.tol = 1e-10;
        popts.delta_est = delta;
        popts.force = !in_hyp;
        const PerturbativeResult res =
            solve_perturbative(eye, zero, q_pert, f, zero, popts);
        for (double r : res.ratios) max_rho = std::max(max_rho, r);
        iters = res.iterations;
        converged = res.converged ? 1.0 : 0.0;
      } catch (const SolverError&) {
        max_rho = nan;  // divergence is recorded, not scored
      }
      if (in_hyp) {
        inv_ratio = estimate_operator_norm_inverse(eye, q_pert) / base_norm;
        rho_in_max = std::max(rho_in_max, max_rho);
        inv_ratio_max = std::max(inv_ratio_max, inv_ratio);
      }
      rep.rows.push_back({frac, double(profile), max_rho, iters, converged,
                          inv_ratio, in_hyp ? 1.0 : 0.0});
    }
  }

  rep.summary.emplace_back("delta_est", delta);
  rep.summary.emplace_back("rho_in_hypothesis_max", rho_in_max);
  rep.summary.emplace_back("inv_norm_ratio_max", inv_ratio_max);
  add_criterion(rep, "in-hypothesis contraction", rho_in_max, "<=",
                0.5 + kContractionMargin);
  add_criterion(rep, "perturbed inverse-norm ratio", inv_ratio_max, "<=",
                kInvNormFactor);
  return rep;
}

StabilityReport run_experiment(const std::string& kind, const ExperimentPlan& plan) {
  if (kind == "lip_j1") return lipschitz_ratio_j(1, plan);
  if (kind == "lip_j2") return lipschitz_ratio_j(2, plan);
  if (kind == "mt3") return certify_mt3_constant(plan);
  if (kind == "hs1") return holder_fit_hs1(plan);
  if (kind == "hs3") return holder_fit_hs3(plan);
  if (kind == "glb") return gradient_lower_bound_scan(plan);
  if (kind == "pos") return positivity_harnack_check(plan);
  if (kind == "interp") return interpolation_checks(plan);
  if (kind == "vanish") return vanishing_order_scan(plan);
  if (kind == "contract") return contraction_audit(plan);
  throw ConfigError("unknown experiment kind: " + kind);
}

}  // namespace hiflab
