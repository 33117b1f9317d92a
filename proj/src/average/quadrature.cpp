#include "arraylight/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace arraylight {

QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
  // Jacobi matrix of the probabilists' Hermite polynomials.
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) j(k - 1, k) = j(k, k - 1) = std::sqrt(static_cast<double>(k));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(j);
  if (eig.info() != Eigen::Success) throw std::runtime_error("gauss_hermite: eigen-decomposition failed");

  QuadratureRule rule;
  rule.order = order;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    const double v0 = eig.eigenvectors()(0, i);
    rule.nodes[static_cast<std::size_t>(i)] = eig.eigenvalues()(i);
    rule.weights[static_cast<std::size_t>(i)] = v0 * v0;
  }
  // Symmetrise: the exact rule is even, the eigensolver only nearly so.
  for (int i = 0; i < order / 2; ++i) {
    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(order - 1 - i);
    const double x = 0.5 * (rule.nodes[b] - rule.nodes[a]);
    const double w = 0.5 * (rule.weights[a] + rule.weights[b]);
    rule.nodes[a] = -x;
    rule.nodes[b] = x;
    rule.weights[a] = rule.weights[b] = w;
  }
  if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  return rule;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

}  // namespace arraylight
