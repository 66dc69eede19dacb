#include "hiflab/internal_data.hpp"

#include <cmath>

#include "hiflab/operators.hpp"
#include "hiflab/util.hpp"

namespace hiflab {

DataKind data_kind_from_string(const std::string& name) {
  if (name == "qu") return DataKind::qu;
  if (name == "qu2") return DataKind::qu2;
  if (name == "power") return DataKind::power;
  if (name == "raw_u") return DataKind::raw_u;
  throw ConfigError("unknown data kind: " + name);
}

std::string to_string(DataKind kind) {
  switch (kind) {
    case DataKind::qu: return "qu";
    case DataKind::qu2: return "qu2";
    case DataKind::power: return "power";
    case DataKind::raw_u: return "raw_u";
  }
  throw ConfigError("unreachable data kind");
}

ScalarField synthesize(DataKind kind, const MatrixField& a,
                       const ScalarField& q, const ScalarField& u) {
  require_same_grid(a.grid(), u.grid(), "synthesize");
  require_same_grid(q.grid(), u.grid(), "synthesize");
  const Grid& g = u.grid();
  ScalarField h(g);
  switch (kind) {
    case DataKind::qu:
      for (std::size_t k = 0; k < h.values().size(); ++k) {
        h.values()[k] = q.values()[k] * u.values()[k];
      }
      break;
    case DataKind::qu2:
      for (std::size_t k = 0; k < h.values().size(); ++k) {
        h.values()[k] = q.values()[k] * u.values()[k] * u.values()[k];
      }
      break;
    case DataKind::power: {
      const GradientField grad = gradient(u);
      for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
          const double gx = grad.dx(i, j);
          const double gy = grad.dy(i, j);
          h(i, j) = a.a11(i, j) * gx * gx + 2.0 * a.a12(i, j) * gx * gy +
                    a.a22(i, j) * gy * gy;
        }
      }
      break;
    }
    case DataKind::raw_u:
      h.values() = u.values();
      break;
  }
  return h;
}

NoiseSpec::Model noise_model_from_string(const std::string& name) {
  if (name == "none") return NoiseSpec::Model::none;
  if (name == "additive-gaussian") return NoiseSpec::Model::additive_gaussian;
  if (name == "relative-gaussian") return NoiseSpec::Model::relative_gaussian;
  throw ConfigError("unknown noise model: " + name);
}

ScalarField add_noise(const ScalarField& h, const NoiseSpec& spec) {
  if (spec.level < 0.0) throw ConfigError("noise level must be >= 0");
  if (spec.model == NoiseSpec::Model::none || spec.level == 0.0) return h;
  GaussianSampler gauss(spec.seed);
  ScalarField out = h;
  for (double& v : out.values()) {
    const double g = gauss.normal();
    if (spec.model == NoiseSpec::Model::additive_gaussian) {
      v += spec.level * g;
    } else {
      v *= 1.0 + spec.level * g;
    }
  }
  return out;
}

QuotientData quotient_transform(const ScalarField& u1, const ScalarField& u2,
                                const ScalarField& a, double floor) {
  require_same_grid(u1.grid(), u2.grid(), "quotient_transform");
  require_same_grid(u1.grid(), a.grid(), "quotient_transform");
  if (!(floor > 0.0)) throw ConfigError("quotient floor must be positive");
  if (min_value(u1) < floor) {
    throw ReconstructionError("u_floor",
                              "first load dips below the positivity floor");
  }
  const Grid& g = u1.grid();
  QuotientData out{ScalarField(g), ScalarField(g), 0.0};
  for (std::size_t k = 0; k < u1.values().size(); ++k) {
    out.ratio.values()[k] = u2.values()[k] / u1.values()[k];
    out.sigma.values()[k] = a.values()[k] * u1.values()[k] * u1.values()[k];
  }
  out.residual_inf = max_abs_interior(divergence_a_grad(out.sigma, out.ratio));
  return out;
}

}  // namespace hiflab
