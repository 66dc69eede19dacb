#include "hiflab/operators.hpp"

namespace hiflab {

ScalarField dx_quotient(const ScalarField& u) {
  const Grid& g = u.grid();
  const double h = g.hx();
  ScalarField out(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (i == 0) {
        out(i, j) = (-3.0 * u(0, j) + 4.0 * u(1, j) - u(2, j)) / (2.0 * h);
      } else if (i == g.nx() - 1) {
        const int n = g.nx() - 1;
        out(i, j) = (3.0 * u(n, j) - 4.0 * u(n - 1, j) + u(n - 2, j)) / (2.0 * h);
      } else {
        out(i, j) = (u(i + 1, j) - u(i - 1, j)) / (2.0 * h);
      }
    }
  }
  return out;
}

ScalarField dy_quotient(const ScalarField& u) {
  const Grid& g = u.grid();
  const double h = g.hy();
  ScalarField out(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (j == 0) {
        out(i, j) = (-3.0 * u(i, 0) + 4.0 * u(i, 1) - u(i, 2)) / (2.0 * h);
      } else if (j == g.ny() - 1) {
        const int n = g.ny() - 1;
        out(i, j) = (3.0 * u(i, n) - 4.0 * u(i, n - 1) + u(i, n - 2)) / (2.0 * h);
      } else {
        out(i, j) = (u(i, j + 1) - u(i, j - 1)) / (2.0 * h);
      }
    }
  }
  return out;
}

GradientField gradient(const ScalarField& u) {
  return GradientField{dx_quotient(u), dy_quotient(u)};
}

ScalarField divergence_a_grad(const MatrixField& a, const ScalarField& u) {
  require_same_grid(a.grid(), u.grid(), "divergence_a_grad");
  const Grid& g = u.grid();
  const double hx2 = g.hx() * g.hx();
  const double hy2 = g.hy() * g.hy();
  const double hxy4 = 4.0 * g.hx() * g.hy();
  ScalarField out(g);
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      const double ae = 0.5 * (a.a11(i, j) + a.a11(i + 1, j));
      const double aw = 0.5 * (a.a11(i, j) + a.a11(i - 1, j));
      const double an = 0.5 * (a.a22(i, j) + a.a22(i, j + 1));
      const double as = 0.5 * (a.a22(i, j) + a.a22(i, j - 1));
      double v = (ae * (u(i + 1, j) - u(i, j)) - aw * (u(i, j) - u(i - 1, j))) / hx2 +
                 (an * (u(i, j + 1) - u(i, j)) - as * (u(i, j) - u(i, j - 1))) / hy2;
      // Cross terms ∂x(a12 ∂y u) + ∂y(a12 ∂x u), centered; couples the four
      // diagonal neighbors and assembles to an exactly symmetric matrix.
      v += (a.a12(i + 1, j) * (u(i + 1, j + 1) - u(i + 1, j - 1)) -
            a.a12(i - 1, j) * (u(i - 1, j + 1) - u(i - 1, j - 1))) /
           hxy4;
      v += (a.a12(i, j + 1) * (u(i + 1, j + 1) - u(i - 1, j + 1)) -
            a.a12(i, j - 1) * (u(i + 1, j - 1) - u(i - 1, j - 1))) /
           hxy4;
      out(i, j) = v;
    }
  }
  return out;
}

ScalarField divergence_a_grad(const ScalarField& a, const ScalarField& u) {
  require_same_grid(a.grid(), u.grid(), "divergence_a_grad");
  const Grid& g = u.grid();
  const double hx2 = g.hx() * g.hx();
  const double hy2 = g.hy() * g.hy();
  ScalarField out(g);
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      const double ae = 0.5 * (a(i, j) + a(i + 1, j));
      const double aw = 0.5 * (a(i, j) + a(i - 1, j));
      const double an = 0.5 * (a(i, j) + a(i, j + 1));
      const double as = 0.5 * (a(i, j) + a(i, j - 1));
      out(i, j) =
          (ae * (u(i + 1, j) - u(i, j)) - aw * (u(i, j) - u(i - 1, j))) / hx2 +
          (an * (u(i, j + 1) - u(i, j)) - as * (u(i, j) - u(i, j - 1))) / hy2;
    }
  }
  return out;
}

ScalarField laplacian(const ScalarField& u) {
  const Grid& g = u.grid();
  const double hx2 = g.hx() * g.hx();
  const double hy2 = g.hy() * g.hy();
  ScalarField out(g);
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      out(i, j) = (u(i + 1, j) - 2.0 * u(i, j) + u(i - 1, j)) / hx2 +
                  (u(i, j + 1) - 2.0 * u(i, j) + u(i, j - 1)) / hy2;
    }
  }
  return out;
}

}  // namespace hiflab
