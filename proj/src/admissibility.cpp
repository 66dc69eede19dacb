#include "hiflab/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "hiflab/norms.hpp"
#include "hiflab/operators.hpp"
#include "hiflab/sparse.hpp"

namespace hiflab {

namespace {

constexpr double kPi = std::numbers::pi;

// Interior 5-point -Δ matrix, Dirichlet rows eliminated.
CsrMatrix interior_laplace_matrix(const Grid& g) {
  const double cx = 1.0 / (g.hx() * g.hx());
  const double cy = 1.0 / (g.hy() * g.hy());
  CsrBuilder builder(g.num_interior());
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      std::vector<std::pair<int, double>> row;
      row.reserve(5);
      row.emplace_back(g.interior_index(i, j), 2.0 * cx + 2.0 * cy);
      if (g.is_interior(i - 1, j)) row.emplace_back(g.interior_index(i - 1, j), -cx);
      if (g.is_interior(i + 1, j)) row.emplace_back(g.interior_index(i + 1, j), -cx);
      if (g.is_interior(i, j - 1)) row.emplace_back(g.interior_index(i, j - 1), -cy);
      if (g.is_interior(i, j + 1)) row.emplace_back(g.interior_index(i, j + 1), -cy);
      builder.add_row(g.interior_index(i, j), std::move(row));
    }
  }
  return builder.take();
}

double slack(double scale) { return 1e-12 * (1.0 + std::abs(scale)); }

double matrix_lipschitz(const MatrixField& a) {
  const ScalarField p11(a.grid(), a.a11());
  const ScalarField p12(a.grid(), a.a12());
  const ScalarField p22(a.grid(), a.a22());
  return std::max({lipschitz_seminorm(p11), lipschitz_seminorm(p12),
                   lipschitz_seminorm(p22)});
}

double matrix_sup(const MatrixField& a) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.a11().size(); ++k) {
    m = std::max({m, std::abs(a.a11()[k]), std::abs(a.a12()[k]),
                  std::abs(a.a22()[k])});
  }
  return m;
}

struct SeriesSample {
  ScalarField fluctuation;
  double gradient_bound;  // sum |c_kl| pi (k+l)
};

SeriesSample cosine_series(const SamplerConfig& cfg, const Grid& grid,
                           std::uint64_t seed) {
  if (cfg.modes < 1) throw ConfigError("sampler: modes must be >= 1");
  if (!(cfg.decay > 1.0)) throw ConfigError("sampler: decay must exceed 1");
  if (cfg.amplitude < 0.0) throw ConfigError("sampler: amplitude must be >= 0");

  GaussianSampler gauss(seed);
  const int K = cfg.modes;
  std::vector<double> coeff(static_cast<std::size_t>((K + 1) * (K + 1)), 0.0);
  double grad_bound = 0.0;
  for (int k = 0; k <= K; ++k) {
    for (int l = 0; l <= K; ++l) {
      if (k == 0 && l == 0) continue;
      const double g = gauss.normal();
      const double c =
          cfg.amplitude * g / std::pow(1.0 + k * k + l * l, cfg.decay);
      coeff[static_cast<std::size_t>(k * (K + 1) + l)] = c;
      grad_bound += std::abs(c) * kPi * (k + l);
    }
  }

  std::vector<std::vector<double>> cosx(static_cast<std::size_t>(K + 1)),
      cosy(static_cast<std::size_t>(K + 1));
  for (int k = 0; k <= K; ++k) {
    cosx[k].resize(grid.nx());
    cosy[k].resize(grid.ny());
    for (int i = 0; i < grid.nx(); ++i) cosx[k][i] = std::cos(kPi * k * grid.x(i));
    for (int j = 0; j < grid.ny(); ++j) cosy[k][j] = std::cos(kPi * k * grid.y(j));
  }

  ScalarField field(grid);
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      double s = 0.0;
      for (int k = 0; k <= K; ++k) {
        for (int l = 0; l <= K; ++l) {
          const double c = coeff[static_cast<std::size_t>(k * (K + 1) + l)];
          if (c != 0.0) s += c * cosx[k][i] * cosy[l][j];
        }
      }
      field(i, j) = s;
    }
  }
  return {std::move(field), grad_bound};
}

// Scalar sampling window implied by the class bounds, intersected with the
// explicit clamp. Must end up bounded.
std::pair<double, double> scalar_window(const SamplerConfig& cfg,
                                        const AdmissibleClass& cls) {
  double lo = -cls.lambda;
  double hi = 1e300;
  if (cls.nonpositive_q) hi = 0.0;
  if (cls.q_minus && cls.q_plus) {
    lo = -*cls.q_plus;
    hi = -*cls.q_minus;
  }
  if (cls.q_low && cls.q_high) {
    lo = *cls.q_low;
    hi = *cls.q_high;
  }
  if (cls.coeff_floor) lo = std::max(lo, 0.0);
  lo = std::max(lo, cfg.clamp_lo);
  hi = std::min(hi, cfg.clamp_hi);
  if (!(lo < hi) || std::abs(lo) >= 1e300 || std::abs(hi) >= 1e300) {
    throw ConfigError("sampler: class and clamp bounds give no bounded window");
  }
  return {lo, hi};
}

SampledField sample_into_window(const SamplerConfig& cfg, const Grid& grid,
                                double lo, double hi,
                                std::optional<double> lip_bound,
                                std::uint64_t seed) {
  SeriesSample series = cosine_series(cfg, grid, seed);
  double scale = 1.0;
  if (lip_bound && series.gradient_bound > 0.99 * *lip_bound) {
    scale = 0.99 * *lip_bound / series.gradient_bound;
  }
  const double mid = 0.5 * (lo + hi);
  ScalarField out(grid);
  bool clamped_any = false;
  for (std::size_t k = 0; k < out.values().size(); ++k) {
    double v = mid + scale * series.fluctuation.values()[k];
    if (v < lo || v > hi) clamped_any = true;
    out.values()[k] = std::clamp(v, lo, hi);
  }
  SampledField result{std::move(out), false};
  if (cfg.amplitude > 0.0 && clamped_any) {
    const double spread = max_value(result.field) - min_value(result.field);
    result.clamp_collapsed = spread <= 1e-12 * (1.0 + std::abs(mid));
  }
  return result;
}

}  // namespace

void AdmissibleClass::check_consistency(double lambda1) const {
  if (mu < 1.0) throw ConfigError("class: mu must be >= 1");
  if (lambda < 0.0) throw ConfigError("class: lambda must be >= 0");
  if (q_low || q_high) {
    if (!(q_low && q_high)) throw ConfigError("class: two-sided window needs both ends");
    if (!(0.0 < *q_low && *q_low < *q_high && *q_high < lambda1 / mu)) {
      throw ConfigError("class: two-sided window must satisfy 0 < low < high < lambda1/mu");
    }
  }
  if (q_minus || q_plus) {
    if (!(q_minus && q_plus)) throw ConfigError("class: negative window needs both ends");
    if (!(0.0 < *q_minus && *q_minus <= *q_plus && *q_plus < lambda1)) {
      throw ConfigError("class: negative window must satisfy 0 < q_minus <= q_plus < lambda1");
    }
  }
  if (coeff_floor && !(*coeff_floor > 0.0)) {
    throw ConfigError("class: coefficient floor must be positive");
  }
  if (coeff_floor && norm_budget && !(*coeff_floor <= *norm_budget)) {
    throw ConfigError("class: coefficient floor exceeds the norm budget");
  }
}

bool ValidationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ClassCheck& c) { return c.pass; });
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const ClassCheck& c : checks) {
    os << (c.pass ? "pass " : "FAIL ") << c.name << " (observed "
       << format_double(c.observed) << ", bound " << format_double(c.bound)
       << ")\n";
  }
  return os.str();
}

double dirichlet_eigenvalue_closed_form(const Grid& grid) {
  const double sx = std::sin(0.5 * kPi * grid.hx());
  const double sy = std::sin(0.5 * kPi * grid.hy());
  return 4.0 / (grid.hx() * grid.hx()) * sx * sx +
         4.0 / (grid.hy() * grid.hy()) * sy * sy;
}

double first_dirichlet_eigenvalue(const Grid& grid, double rel_tol,
                                  long max_iters) {
  if (grid.nx() < 5 || grid.ny() < 5) {
    throw ConfigError("eigenvalue estimate needs at least 5 nodes per axis");
  }

  static std::mutex cache_mutex;
  static std::map<std::pair<int, int>, double> cache;
  const std::pair<int, int> key{grid.nx(), grid.ny()};
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  const CsrMatrix a = interior_laplace_matrix(grid);
  const std::size_t n = static_cast<std::size_t>(a.n);
  std::vector<double> x(n, 1.0), y(n), ax(n);

  auto dot = [](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
    return s;
  };
  auto normalize = [&](std::vector<double>& v) {
    const double norm = std::sqrt(dot(v, v));
    for (double& e : v) e /= norm;
  };

  normalize(x);
  double lambda = 0.0;
  bool converged = false;
  const double cg_tol = std::min(1e-12, rel_tol * 1e-2);
  for (long it = 0; it < max_iters; ++it) {
    cg_solve(a, x, y, cg_tol, 10L * static_cast<long>(n) + 100);
    normalize(y);
    x = y;
    a.apply(x, ax);
    const double next = dot(x, ax);
    if (it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) {
      lambda = next;
      converged = true;
      break;
    }
    lambda = next;
  }
  if (!converged) {
    throw SolverError("eig", "inverse power iteration did not converge");
  }

  std::lock_guard<std::mutex> lock(cache_mutex);
  cache.emplace(key, lambda);
  return lambda;
}

ValidationReport validate(const MatrixField& a, const ScalarField& q,
                          const AdmissibleClass& cls) {
  require_same_grid(a.grid(), q.grid(), "validate");
  const Grid& g = a.grid();

  ValidationReport report;
  report.lambda1 = first_dirichlet_eigenvalue(g);
  auto add = [&](const std::string& name, double observed, double bound,
                 bool pass) {
    report.checks.push_back({name, observed, bound, pass});
  };

  double eig_min = 1e300, eig_max = -1e300;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const auto [lo, hi] = a.eig_range(i, j);
      eig_min = std::min(eig_min, lo);
      eig_max = std::max(eig_max, hi);
    }
  }
  add("a ellipticity lower", eig_min, 1.0 / cls.mu,
      eig_min >= 1.0 / cls.mu - slack(1.0 / cls.mu));
  add("a ellipticity upper", eig_max, cls.mu, eig_max <= cls.mu + slack(cls.mu));

  const double q_min = min_value(q);
  const double q_max = max_value(q);
  add("q lower bound", q_min, -cls.lambda, q_min >= -cls.lambda - slack(cls.lambda));
  if (cls.nonpositive_q) {
    add("q nonpositive", q_max, 0.0, q_max <= slack(1.0));
  }
  if (cls.q_minus && cls.q_plus) {
    add("q window lower", q_min, -*cls.q_plus, q_min >= -*cls.q_plus - slack(*cls.q_plus));
    add("q window upper", q_max, -*cls.q_minus, q_max <= -*cls.q_minus + slack(*cls.q_minus));
  }
  if (cls.q_low && cls.q_high) {
    add("q two-sided lower", q_min, *cls.q_low, q_min >= *cls.q_low - slack(*cls.q_low));
    add("q two-sided upper", q_max, *cls.q_high, q_max <= *cls.q_high + slack(*cls.q_high));
    add("q upper vs lambda1/mu", *cls.q_high, report.lambda1 / cls.mu,
        *cls.q_high < report.lambda1 / cls.mu);
  }
  if (cls.coeff_floor) {
    add("a floor", eig_min, *cls.coeff_floor,
        eig_min >= *cls.coeff_floor - slack(*cls.coeff_floor));
    add("q nonnegative", q_min, 0.0, q_min >= -slack(1.0));
  }
  if (cls.lipschitz_bound) {
    const double lip_a = matrix_lipschitz(a);
    const double lip_q = lipschitz_seminorm(q);
    add("a lipschitz", lip_a, *cls.lipschitz_bound,
        lip_a <= *cls.lipschitz_bound + slack(*cls.lipschitz_bound));
    add("q lipschitz", lip_q, *cls.lipschitz_bound,
        lip_q <= *cls.lipschitz_bound + slack(*cls.lipschitz_bound));
  }
  if (cls.norm_budget) {
    const double beta = cls.holder_beta.value_or(0.5);
    const double budget = matrix_sup(a) + matrix_lipschitz(a) + max_abs(q) +
                          holder_seminorm(q, beta);
    add("norm budget", budget, *cls.norm_budget,
        budget <= *cls.norm_budget + slack(*cls.norm_budget));
  }

  double eff_lambda = cls.lambda;
  if (cls.q_plus) eff_lambda = std::max(eff_lambda, *cls.q_plus);
  if (cls.q_low && *cls.q_low < 0.0) eff_lambda = std::max(eff_lambda, -*cls.q_low);
  add("coercivity mu*lambda < lambda1", cls.mu * eff_lambda, report.lambda1,
      cls.mu * eff_lambda < report.lambda1);

  return report;
}

SampledField sample_coefficient(const SamplerConfig& cfg,
                                const AdmissibleClass& cls, const Grid& grid) {
  const auto [lo, hi] = scalar_window(cfg, cls);
  return sample_into_window(cfg, grid, lo, hi, cls.lipschitz_bound, cfg.seed);
}

SampledMatrix sample_matrix_coefficient(const SamplerConfig& cfg,
                                        const AdmissibleClass& cls,
                                        const Grid& grid, double angle) {
  double lo = 1.0 / cls.mu;
  double hi = cls.mu;
  if (cls.coeff_floor) lo = std::max(lo, *cls.coeff_floor);
  lo = std::max(lo, cfg.clamp_lo);
  hi = std::min(hi, cfg.clamp_hi);
  if (!(lo < hi)) {
    if (lo == hi || cfg.amplitude == 0.0) {
      hi = lo;  // degenerate window, constant eigenvalues
    } else {
      throw ConfigError("matrix sampler: empty eigenvalue window");
    }
  }

  SampledField s1 = sample_into_window(cfg, grid, lo, hi, cls.lipschitz_bound,
                                       cfg.seed);
  SampledField s2 = sample_into_window(cfg, grid, lo, hi, cls.lipschitz_bound,
                                       cfg.seed ^ 0x9e3779b97f4a7c15ull);

  const double c = std::cos(angle), s = std::sin(angle);
  MatrixField out(grid);
  for (std::size_t k = 0; k < out.a11().size(); ++k) {
    const double e1 = s1.field.values()[k];
    const double e2 = s2.field.values()[k];
    out.a11()[k] = c * c * e1 + s * s * e2;
    out.a12()[k] = c * s * (e1 - e2);
    out.a22()[k] = s * s * e1 + c * c * e2;
  }
  return {std::move(out), s1.clamp_collapsed || s2.clamp_collapsed};
}

ManufacturedCase manufactured_case(const Grid& grid, const std::string& name,
                                   const ManufacturedParams& params) {
  if (name == "linear") {
    ScalarField u = ScalarField::from_function(grid, [&](double x, double y) {
      return params.alpha * x + params.beta * y + params.gamma;
    });
    return {name, MatrixField::identity(grid), ScalarField(grid, 0.0),
            BoundaryTrace::trace_of(u), std::move(u)};
  }
  if (name == "exp") {
    if (!(params.c > 0.0)) throw ConfigError("exp case needs c > 0");
    const double root = std::sqrt(params.c);
    ScalarField u = ScalarField::from_function(
        grid, [&](double x, double) { return std::exp(root * x); });
    return {name, MatrixField::identity(grid), ScalarField(grid, params.c),
            BoundaryTrace::trace_of(u), std::move(u)};
  }
  if (name == "helmholtz") {
    if (!(params.c > 0.0)) throw ConfigError("helmholtz case needs c > 0");
    const double root = std::sqrt(params.c);
    ScalarField u = ScalarField::from_function(
        grid, [&](double x, double) { return std::sin(root * x); });
    return {name, MatrixField::identity(grid), ScalarField(grid, -params.c),
            BoundaryTrace::trace_of(u), std::move(u)};
  }
  throw ConfigError("unknown catalog case: " + name);
}

BoundaryTrace make_illumination(const Grid& grid, const IlluminationSpec& spec) {
  if (spec.kind == "const") {
    return BoundaryTrace(grid, std::vector<double>(
                                   static_cast<std::size_t>(grid.num_boundary()),
                                   spec.value));
  }
  if (spec.kind == "linear_x") {
    return BoundaryTrace::from_function(grid, [](double x, double) { return x; });
  }
  if (spec.kind == "bilinear") {
    return BoundaryTrace::from_function(
        grid, [](double x, double y) { return x + y + x * y; });
  }
  if (spec.kind == "cos_arc") {
    return BoundaryTrace::from_function(grid, [](double x, double y) {
      double s = 0.0;
      if (y == 0.0) {
        s = x;
      } else if (x == 1.0) {
        s = 1.0 + y;
      } else if (y == 1.0) {
        s = 2.0 + (1.0 - x);
      } else {
        s = 3.0 + (1.0 - y);
      }
      return std::cos(kPi * s);
    });
  }
  throw ConfigError("unknown illumination kind: " + spec.kind);
}

}  // namespace hiflab
