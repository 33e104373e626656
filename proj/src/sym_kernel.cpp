#include "chaosbound/sym_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chaosbound/error.hpp"

namespace chaosbound {

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

}  // namespace

std::size_t multiset_count(int dim, int order) {
  if (order == 0) return 1;
  return binomial(static_cast<std::size_t>(dim + order - 1), static_cast<std::size_t>(order));
}

std::size_t multiset_rank(std::span<const int> sorted) {
  std::size_t rank = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k)
    rank += binomial(static_cast<std::size_t>(sorted[k]) + k, k + 1);
  return rank;
}

bool next_multiset(std::span<int> sorted, int dim) {
  const std::size_t q = sorted.size();
  for (std::size_t k = 0; k < q; ++k) {
    const bool can_grow = (k + 1 < q) ? sorted[k] < sorted[k + 1] : sorted[k] + 1 < dim;
    if (can_grow) {
      ++sorted[k];
      std::fill(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), 0);
      return true;
    }
  }
  std::fill(sorted.begin(), sorted.end(), 0);
  return false;
}

double ordering_count(std::span<const int> sorted) {
  double count = std::tgamma(static_cast<double>(sorted.size()) + 1.0);
  std::size_t run = 1;
  for (std::size_t k = 1; k <= sorted.size(); ++k) {
    if (k < sorted.size() && sorted[k] == sorted[k - 1]) {
      ++run;
    } else {
      count /= std::tgamma(static_cast<double>(run) + 1.0);
      run = 1;
    }
  }
  return std::round(count);
}

SymKernel::SymKernel(SpacePtr space, int order) : space_(std::move(space)), order_(order) {
  if (!space_) throw InvalidArgument("SymKernel: null space");
  if (order < 0) throw InvalidOrder("SymKernel: order must be >= 0, got " + std::to_string(order));
  coeffs_.assign(multiset_count(space_->dim(), order), 0.0);
}

SymKernel SymKernel::scalar(SpacePtr space, double value) {
  SymKernel k(std::move(space), 0);
  k.coeffs_[0] = value;
  return k;
}

std::size_t SymKernel::index_of(std::span<const int> indices) const {
  if (static_cast<int>(indices.size()) != order_)
    throw InvalidArgument("SymKernel: multi-index length does not match the order");
  std::vector<int> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  for (int i : sorted)
    if (i < 0 || i >= dim()) throw InvalidArgument("SymKernel: index out of range");
  return multiset_rank(sorted);
}

double SymKernel::coefficient(std::span<const int> indices) const { return coeffs_[index_of(indices)]; }

void SymKernel::set_coefficient(std::span<const int> indices, double value) {
  coeffs_[index_of(indices)] = value;
}

void SymKernel::add_coefficient(std::span<const int> indices, double value) {
  coeffs_[index_of(indices)] += value;
}

double SymKernel::entry(std::span<const int> indices) const {
  std::vector<int> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  return coefficient(sorted) / ordering_count(sorted);
}

bool SymKernel::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

SymKernel& SymKernel::operator+=(const SymKernel& other) {
  require_same_space(space_, other.space_, "SymKernel::operator+=");
  if (order_ != other.order_) throw InvalidOrder("SymKernel: cannot add kernels of different orders");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

SymKernel& SymKernel::operator-=(const SymKernel& other) {
  require_same_space(space_, other.space_, "SymKernel::operator-=");
  if (order_ != other.order_) throw InvalidOrder("SymKernel: cannot subtract kernels of different orders");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  return *this;
}

SymKernel& SymKernel::operator*=(double factor) {
  for (double& c : coeffs_) c *= factor;
  return *this;
}

}  // namespace chaosbound
