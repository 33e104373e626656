#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chaosbound/gram_space.hpp"

namespace chaosbound {

/// Number of non-decreasing multi-indices of length `order` over [0, dim).
std::size_t multiset_count(int dim, int order);

/// Colexicographic rank of a non-decreasing multi-index.
std::size_t multiset_rank(std::span<const int> sorted);

/// Advances `sorted` to its colexicographic successor. Returns false (and
/// leaves the index reset to all zeros) after the last multi-index.
bool next_multiset(std::span<int> sorted, int dim);

/// Number of distinct orderings of a multi-index: q! / prod(k_j!).
double ordering_count(std::span<const int> sorted);

/// Order-q symmetric tensor over a GramSpace.
///
/// Storage is one coefficient per non-decreasing multi-index m. The stored
/// value c_m is the coefficient of the symmetrized basis tensor sym(e_m), so a
/// full-tensor entry at any ordering of m equals c_m / ordering_count(m).
/// Example: (e_0 + e_1)^{(x)2} stores (0,0) -> 1, (0,1) -> 2, (1,1) -> 1.
class SymKernel {
 public:
  SymKernel(SpacePtr space, int order);

  static SymKernel scalar(SpacePtr space, double value);

  const SpacePtr& space() const { return space_; }
  int dim() const { return space_->dim(); }
  int order() const { return order_; }
  std::size_t size() const { return coeffs_.size(); }

  /// Stored coefficient for any ordering of `indices`.
  double coefficient(std::span<const int> indices) const;
  void set_coefficient(std::span<const int> indices, double value);
  void add_coefficient(std::span<const int> indices, double value);

  /// Full-tensor entry at the given (unsorted) index tuple.
  double entry(std::span<const int> indices) const;

  std::span<const double> packed() const { return coeffs_; }
  std::span<double> packed() { return coeffs_; }

  /// Calls fn(sorted_multi_index, coefficient) for every stored coefficient,
  /// in colexicographic order.
  template <class Fn>
  void for_each(Fn&& fn) const {
    std::vector<int> m(static_cast<std::size_t>(order_), 0);
    std::size_t k = 0;
    do {
      fn(std::span<const int>(m), coeffs_[k++]);
    } while (next_multiset(m, dim()));
  }

  bool is_zero() const;

  SymKernel& operator+=(const SymKernel& other);
  SymKernel& operator-=(const SymKernel& other);
  SymKernel& operator*=(double factor);

  friend SymKernel operator+(SymKernel a, const SymKernel& b) { return a += b; }
  friend SymKernel operator-(SymKernel a, const SymKernel& b) { return a -= b; }
  friend SymKernel operator*(SymKernel a, double s) { return a *= s; }
  friend SymKernel operator*(double s, SymKernel a) { return a *= s; }

 private:
  std::size_t index_of(std::span<const int> indices) const;

  SpacePtr space_;
  int order_;
  std::vector<double> coeffs_;
};

}  // namespace chaosbound
