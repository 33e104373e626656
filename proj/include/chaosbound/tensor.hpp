#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "chaosbound/gram_space.hpp"
#include "chaosbound/sym_kernel.hpp"

namespace chaosbound {

/// Dense order-q tensor over a GramSpace, row-major with d^q entries.
/// Used for non-symmetric intermediates such as contractions.
class Tensor {
 public:
  Tensor(SpacePtr space, int order);

  const SpacePtr& space() const { return space_; }
  int dim() const { return space_->dim(); }
  int order() const { return order_; }
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }

  double& at(std::span<const int> indices) { return data_[flat_index(indices)]; }
  double at(std::span<const int> indices) const { return data_[flat_index(indices)]; }

  std::size_t flat_index(std::span<const int> indices) const;

 private:
  SpacePtr space_;
  int order_;
  std::vector<double> data_;
};

Tensor to_tensor(const SymKernel& f);

/// Average over all q! slot permutations.
SymKernel symmetrize(const Tensor& t);

/// h^{(x)q} for a coordinate vector h in the basis of `space`.
SymKernel tensor_power(const SpacePtr& space, std::span<const double> h, int q);

Tensor tensor_product(const Tensor& f, const Tensor& g);

/// r-th contraction: the last r slots of f are paired with the last r slots
/// of g through the Gram matrix. The result has the p-r free slots of f
/// followed by the q-r free slots of g.
Tensor contract(const Tensor& f, const Tensor& g, int r);
Tensor contract(const SymKernel& f, const SymKernel& g, int r);

/// Symmetrized contraction.
SymKernel contract_sym(const SymKernel& f, const SymKernel& g, int r);

/// Inner product in the tensor power of the space (induced Gram metric).
double gram_inner(const Tensor& f, const Tensor& g);
double gram_inner(const SymKernel& f, const SymKernel& g);

double norm_squared(const Tensor& f);
double norm_squared(const SymKernel& f);
double norm(const Tensor& f);
double norm(const SymKernel& f);

/// Multiplies modes [first, first + count) by `matrix`: for each such slot,
/// out(..., j, ...) = sum_i matrix(j, i) t(..., i, ...).
Tensor apply_to_modes(const Tensor& t, const Eigen::MatrixXd& matrix, int first, int count);

}  // namespace chaosbound
