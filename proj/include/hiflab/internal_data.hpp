#pragma once

#include <string>

#include "hiflab/field.hpp"

namespace hiflab {

// Internal energy densities: qu, qu², a|∇u|², or the displacement itself.
enum class DataKind { qu, qu2, power, raw_u };

DataKind data_kind_from_string(const std::string& name);
std::string to_string(DataKind kind);

ScalarField synthesize(DataKind kind, const MatrixField& a,
                       const ScalarField& q, const ScalarField& u);

struct NoiseSpec {
  enum class Model { none, additive_gaussian, relative_gaussian };
  Model model = Model::none;
  double level = 0.0;
  std::uint64_t seed = 0;
};

NoiseSpec::Model noise_model_from_string(const std::string& name);

ScalarField add_noise(const ScalarField& h, const NoiseSpec& spec);

struct QuotientData {
  ScalarField ratio;        // w = u2 / u1
  ScalarField sigma;        // a * u1^2
  double residual_inf = 0;  // ‖div(σ∇w)‖_∞ over interior nodes
};

// Two-load quotient reduction, scalar diffusion only. Throws (reason
// "u_floor") if u1 dips below the floor anywhere.
QuotientData quotient_transform(const ScalarField& u1, const ScalarField& u2,
                                const ScalarField& a, double floor = 1e-8);

}  // namespace hiflab
