#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hiflab {

// Error hierarchy. `reason()` carries a short machine-readable tag that the
// CLI maps to exit codes and prints verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string reason, const std::string& message)
      : std::runtime_error(message), reason_(std::move(reason)) {}
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
  explicit ConfigError(const std::string& message) : Error("config", message) {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class ReconstructionError : public Error {
 public:
  using Error::Error;
};

// Shortest round-trip decimal form, locale-independent. Report files must be
// byte-reproducible across runs, so all floating-point output funnels here.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(const void* data, std::size_t size,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::vector<double>& v,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  return fnv1a64(v.data(), v.size() * sizeof(double), seed);
}

// Deterministic Gaussian stream: mt19937_64 + Box-Muller, no dependence on
// std::normal_distribution's unspecified algorithm.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(phi);
    have_cached_ = true;
    return r * std::cos(phi);
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_stderr = 0.0;
  double slope_ci95 = 0.0;  // half-width, t-quantile with n-2 dof
  int n = 0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// log2(coarse/fine) observed orders for successive grid refinements.
std::vector<double> observed_orders(const std::vector<double>& errors);

}  // namespace hiflab
