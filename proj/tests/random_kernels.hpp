#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "chaosbound/gram_space.hpp"
#include "chaosbound/sym_kernel.hpp"

namespace chaosbound::testing {

/// Random PSD Gram matrix A A^T / dim with a small ridge.
inline SpacePtr random_space(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = normal(rng);
  Eigen::MatrixXd g = a * a.transpose() / dim + 0.1 * Eigen::MatrixXd::Identity(dim, dim);
  g = 0.5 * (g + g.transpose());
  return GramSpace::make(g);
}

inline SymKernel random_kernel(const SpacePtr& space, int order, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  SymKernel f(space, order);
  for (double& c : f.packed()) c = normal(rng);
  return f;
}

}  // namespace chaosbound::testing
