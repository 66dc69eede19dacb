#include "hiflab/util.hpp"

#include <algorithm>
#include <numeric>

namespace hiflab {

namespace {

// Two-sided 95% t-quantiles for 1..20 dof, then the asymptote.
double t_quantile_95(int dof) {
  static constexpr double table[] = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086};
  if (dof < 1) return 0.0;
  if (dof <= 20) return table[dof - 1];
  return 1.96;
}

}  // namespace

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ConfigError("linear_fit needs at least two paired points");
  }
  const int n = static_cast<int>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw ConfigError("linear_fit: degenerate abscissae");

  LinearFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  if (n > 2) {
    fit.slope_stderr = std::sqrt(ss_res / (n - 2) / sxx);
    fit.slope_ci95 = t_quantile_95(n - 2) * fit.slope_stderr;
  }
  return fit;
}

std::vector<double> observed_orders(const std::vector<double>& errors) {
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    orders.push_back(std::log2(errors[i] / errors[i + 1]));
  }
  return orders;
}

}  // namespace hiflab
