#pragma once

#include <vector>

namespace qmeas {

/// Nodes and weights for integrals of f(x) exp(-x^2) over the real line.
struct GaussHermiteRule {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // w_k, includes the exp(-x^2) weight
  /// w_k * exp(x_k^2), for integrands that carry their own Gaussian factor.
  std::vector<double> scaled_weights;
};

/// Newton-refined Gauss-Hermite rule of the given order (1..400).
GaussHermiteRule gauss_hermite(int order);

}  // namespace qmeas
