#pragma once

#include <span>
#include <vector>

namespace arraylight {

/// Gauss-Hermite rule against the standard normal density:
///   E[f(Z)] ~= sum_i weights[i] f(nodes[i]),  Z ~ N(0, 1).
/// Exact for polynomials of degree <= 2 order - 1; weights sum to 1.
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch construction.  Throws std::invalid_argument for order < 1.
QuadratureRule gauss_hermite(int order);

/// Pairwise (cascade) summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

}  // namespace arraylight
