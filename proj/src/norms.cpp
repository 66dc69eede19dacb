#include "hiflab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hiflab/operators.hpp"

namespace hiflab {

double quad_weight(const Grid& g, int i, int j) {
  double w = g.hx() * g.hy();
  if (i == 0 || i == g.nx() - 1) w *= 0.5;
  if (j == 0 || j == g.ny() - 1) w *= 0.5;
  return w;
}

double integral(const ScalarField& f) {
  const Grid& g = f.grid();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) s += quad_weight(g, i, j) * f(i, j);
  }
  return s;
}

double norm_linf(const ScalarField& f) { return max_abs(f); }

double norm_l2(const ScalarField& f) {
  const Grid& g = f.grid();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      s += quad_weight(g, i, j) * f(i, j) * f(i, j);
    }
  }
  return std::sqrt(s);
}

double norm_l1(const ScalarField& f) {
  const Grid& g = f.grid();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      s += quad_weight(g, i, j) * std::abs(f(i, j));
    }
  }
  return s;
}

double norm_l2_diff(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid(), "norm_l2_diff");
  const Grid& gr = f.grid();
  double s = 0.0;
  for (int j = 0; j < gr.ny(); ++j) {
    for (int i = 0; i < gr.nx(); ++i) {
      const double d = f(i, j) - g(i, j);
      s += quad_weight(gr, i, j) * d * d;
    }
  }
  return std::sqrt(s);
}

double norm_linf_diff(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid(), "norm_linf_diff");
  double m = 0.0;
  for (std::size_t k = 0; k < f.values().size(); ++k) {
    m = std::max(m, std::abs(f.values()[k] - g.values()[k]));
  }
  return m;
}

double lipschitz_seminorm(const ScalarField& f) {
  const Grid& g = f.grid();
  double m = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (i + 1 < g.nx()) m = std::max(m, std::abs(f(i + 1, j) - f(i, j)) / g.hx());
      if (j + 1 < g.ny()) m = std::max(m, std::abs(f(i, j + 1) - f(i, j)) / g.hy());
    }
  }
  return m;
}

double holder_seminorm(const ScalarField& f, double beta,
                       const HolderOptions& opts) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw ConfigError("holder_seminorm: beta must lie in (0, 1]");
  }
  const Grid& g = f.grid();
  double m = 0.0;
  auto consider = [&](int i0, int j0, int i1, int j1) {
    const double dx = g.x(i1) - g.x(i0);
    const double dy = g.y(j1) - g.y(j0);
    const double dist = std::sqrt(dx * dx + dy * dy);
    if (dist == 0.0 || dist > opts.max_distance) return;
    const double q = std::abs(f(i1, j1) - f(i0, j0)) / std::pow(dist, beta);
    m = std::max(m, q);
  };

  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (i + 1 < g.nx()) consider(i, j, i + 1, j);
      if (j + 1 < g.ny()) consider(i, j, i, j + 1);
    }
  }

  if (opts.all_pairs) {
    const int n = g.num_nodes();
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        consider(g.node_i(a), g.node_j(a), g.node_i(b), g.node_j(b));
      }
    }
    return m;
  }

  std::mt19937_64 eng(opts.seed);
  const int n = g.num_nodes();
  for (int s = 0; s < opts.sampled_pairs; ++s) {
    const int a = static_cast<int>(eng() % static_cast<std::uint64_t>(n));
    const int b = static_cast<int>(eng() % static_cast<std::uint64_t>(n));
    if (a == b) continue;
    consider(g.node_i(a), g.node_j(a), g.node_i(b), g.node_j(b));
  }
  return m;
}

NormBundle norms(const ScalarField& f, double beta, const HolderOptions& opts) {
  const Grid& g = f.grid();
  if (g.nx() < 5 || g.ny() < 5) {
    throw ConfigError("norms: grid too coarse for third-order quotients");
  }

  NormBundle out;
  out.linf = norm_linf(f);
  out.l2 = norm_l2(f);
  out.lipschitz = lipschitz_seminorm(f);
  out.holder_beta = beta;
  out.holder = holder_seminorm(f, beta, opts);

  const ScalarField ux = dx_quotient(f);
  const ScalarField uy = dy_quotient(f);
  const ScalarField uxx = dx_quotient(ux);
  const ScalarField uxy = dy_quotient(ux);
  const ScalarField uyy = dy_quotient(uy);
  const ScalarField uxxx = dx_quotient(uxx);
  const ScalarField uxxy = dy_quotient(uxx);
  const ScalarField uxyy = dy_quotient(uxy);
  const ScalarField uyyy = dy_quotient(uyy);

  auto sq = [](double v) { return v * v; };
  const double o1 = sq(norm_l2(ux)) + sq(norm_l2(uy));
  const double o2 = sq(norm_l2(uxx)) + sq(norm_l2(uxy)) + sq(norm_l2(uyy));
  const double o3 = sq(norm_l2(uxxx)) + sq(norm_l2(uxxy)) + sq(norm_l2(uxyy)) +
                    sq(norm_l2(uyyy));
  out.h1 = std::sqrt(sq(out.l2) + o1);
  out.h2 = std::sqrt(sq(out.l2) + o1 + o2);
  out.h3 = std::sqrt(sq(out.l2) + o1 + o2 + o3);
  return out;
}

}  // namespace hiflab
