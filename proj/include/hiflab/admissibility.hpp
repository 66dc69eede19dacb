#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hiflab/field.hpp"

namespace hiflab {

// Coefficient-class parameters. Only the bounds that are set are enforced by
// validate(); mu/lambda always are. Coercivity requires mu*lambda < λ1.
struct AdmissibleClass {
  double mu = 1.0;      // eigenvalues of a within [1/mu, mu]
  double lambda = 0.0;  // q >= -lambda

  bool nonpositive_q = false;                 // additionally q <= 0
  std::optional<double> q_minus;              // with q_plus: -q_plus <= q <= -q_minus
  std::optional<double> q_plus;
  std::optional<double> q_low;                // with q_high: q_low <= q <= q_high
  std::optional<double> q_high;
  std::optional<double> min_illumination;     // m: required essinf of f on Γ
  std::optional<double> lipschitz_bound;      // cap on discrete Lipschitz seminorms
  std::optional<double> coeff_floor;          // a >= coeff_floor, q >= 0
  std::optional<double> norm_budget;          // cap on sup-norm + Lipschitz budget
  std::optional<double> holder_beta;          // seminorm exponent for the budget

  void check_consistency(double lambda1) const;  // throws ConfigError
};

struct ClassCheck {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  bool pass = true;
};

struct ValidationReport {
  std::vector<ClassCheck> checks;
  double lambda1 = 0.0;
  bool pass() const;
  std::string to_string() const;
};

// Smallest eigenvalue of the 5-point Dirichlet Laplacian, inverse power
// iteration from the all-ones interior vector. Memoized per grid size.
double first_dirichlet_eigenvalue(const Grid& grid, double rel_tol = 1e-10,
                                  long max_iters = 100000);

// Closed form for the same discrete eigenvalue on a uniform grid.
double dirichlet_eigenvalue_closed_form(const Grid& grid);

ValidationReport validate(const MatrixField& a, const ScalarField& q,
                          const AdmissibleClass& cls);

struct SamplerConfig {
  std::uint64_t seed = 1;
  int modes = 4;          // Fourier modes per axis
  double amplitude = 0.0;
  double decay = 2.0;     // spectral decay exponent, > 1
  double clamp_lo = -1e300;
  double clamp_hi = 1e300;
};

struct SampledField {
  ScalarField field;
  bool clamp_collapsed = false;  // clamping flattened the sample to a constant
};

struct SampledMatrix {
  MatrixField field;
  bool clamp_collapsed = false;
};

// Truncated cosine series with spectrally decaying seeded Gaussian
// coefficients, clamped into the class window around its midpoint. The same
// seed reproduces the same underlying function on any grid.
SampledField sample_coefficient(const SamplerConfig& cfg,
                                const AdmissibleClass& cls, const Grid& grid);

// Rotation-by-constant-angle anisotropy: eigenvalues are two sampled scalar
// fields clamped into [1/mu, mu].
SampledMatrix sample_matrix_coefficient(const SamplerConfig& cfg,
                                        const AdmissibleClass& cls,
                                        const Grid& grid, double angle = 0.0);

// Analytic series bound on the sup of the gradient: sum |c_kl| * pi * (k+l).
double sampler_gradient_bound(const SamplerConfig& cfg);

struct ManufacturedParams {
  double c = 1.0;                              // exp / helmholtz coefficient
  double alpha = 1.0, beta = 0.0, gamma = 0.0; // linear case u = αx+βy+γ
};

struct ManufacturedCase {
  std::string name;
  MatrixField a;
  ScalarField q;
  BoundaryTrace f;
  ScalarField u_exact;
};

// Catalog: "linear" (q=0, u=αx+βy+γ), "exp" (q=c>0, u=e^{√c x}),
// "helmholtz" (q=-c, c<λ1, u=sin(√c x)).
ManufacturedCase manufactured_case(const Grid& grid, const std::string& name,
                                   const ManufacturedParams& params = {});

struct IlluminationSpec {
  std::string kind = "const";  // const | linear_x | bilinear | cos_arc
  double value = 1.0;          // const value / additive offset
};

BoundaryTrace make_illumination(const Grid& grid, const IlluminationSpec& spec);

}  // namespace hiflab
