#pragma once

#include <cstdint>

#include "hiflab/field.hpp"

namespace hiflab {

// Trapezoid quadrature weight of node (i, j): hx*hy, halved per boundary axis.
double quad_weight(const Grid& g, int i, int j);

double integral(const ScalarField& f);  // trapezoid ∫f
double norm_linf(const ScalarField& f);
double norm_l2(const ScalarField& f);
double norm_l1(const ScalarField& f);
double norm_l2_diff(const ScalarField& f, const ScalarField& g);
double norm_linf_diff(const ScalarField& f, const ScalarField& g);

// max over axis-adjacent node pairs of |Δu|/h.
double lipschitz_seminorm(const ScalarField& f);

struct HolderOptions {
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
  int sampled_pairs = 10000;
  bool all_pairs = false;      // exact O(N²) maximum instead of sampling
  double max_distance = 2.0;   // only pairs with |x-y| <= max_distance count
};

// Discrete C^{0,beta} seminorm: max of |u(x)-u(y)|/|x-y|^beta over all
// axis-adjacent pairs plus a seeded sample of far pairs.
double holder_seminorm(const ScalarField& f, double beta,
                       const HolderOptions& opts = {});

struct NormBundle {
  double linf = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double h3 = 0.0;
  double lipschitz = 0.0;
  double holder = 0.0;
  double holder_beta = 0.0;
};

// All discrete norms in one pass. H^k stacks the L2 norms of difference
// quotients up to order k; needs >= 5 nodes per axis for the H3 part.
NormBundle norms(const ScalarField& f, double beta = 0.5,
                 const HolderOptions& holder_opts = {});

}  // namespace hiflab
