#include "chaosbound/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chaosbound/error.hpp"

namespace chaosbound {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Odometer over all d^q full index tuples in row-major order.
bool next_tuple(std::vector<int>& idx, int dim) {
  for (std::size_t k = idx.size(); k-- > 0;) {
    if (++idx[k] < dim) return true;
    idx[k] = 0;
  }
  return false;
}

}  // namespace

Tensor::Tensor(SpacePtr space, int order) : space_(std::move(space)), order_(order) {
  if (!space_) throw InvalidArgument("Tensor: null space");
  if (order < 0) throw InvalidOrder("Tensor: order must be >= 0, got " + std::to_string(order));
  data_.assign(ipow(static_cast<std::size_t>(space_->dim()), order), 0.0);
}

std::size_t Tensor::flat_index(std::span<const int> indices) const {
  if (static_cast<int>(indices.size()) != order_)
    throw InvalidArgument("Tensor: index tuple length does not match the order");
  std::size_t flat = 0;
  for (int i : indices) {
    if (i < 0 || i >= dim()) throw InvalidArgument("Tensor: index out of range");
    flat = flat * static_cast<std::size_t>(dim()) + static_cast<std::size_t>(i);
  }
  return flat;
}

Tensor to_tensor(const SymKernel& f) {
  Tensor t(f.space(), f.order());
  std::vector<int> idx(static_cast<std::size_t>(f.order()), 0);
  std::vector<int> sorted(idx.size());
  std::size_t flat = 0;
  auto coeffs = f.packed();
  do {
    std::copy(idx.begin(), idx.end(), sorted.begin());
    std::sort(sorted.begin(), sorted.end());
    t[flat++] = coeffs[multiset_rank(sorted)] / ordering_count(sorted);
  } while (next_tuple(idx, f.dim()));
  return t;
}

SymKernel symmetrize(const Tensor& t) {
  SymKernel f(t.space(), t.order());
  std::vector<int> idx(static_cast<std::size_t>(t.order()), 0);
  std::vector<int> sorted(idx.size());
  std::size_t flat = 0;
  auto coeffs = f.packed();
  do {
    std::copy(idx.begin(), idx.end(), sorted.begin());
    std::sort(sorted.begin(), sorted.end());
    coeffs[multiset_rank(sorted)] += t[flat++];
  } while (next_tuple(idx, t.dim()));
  return f;
}

SymKernel tensor_power(const SpacePtr& space, std::span<const double> h, int q) {
  if (q < 0) throw InvalidOrder("tensor_power: order must be >= 0, got " + std::to_string(q));
  if (static_cast<int>(h.size()) != space->dim())
    throw InvalidArgument("tensor_power: vector dimension does not match the space");
  SymKernel f(space, q);
  auto coeffs = f.packed();
  std::size_t k = 0;
  f.for_each([&](std::span<const int> m, double) {
    double value = ordering_count(m);
    for (int i : m) value *= h[static_cast<std::size_t>(i)];
    coeffs[k++] = value;
  });
  return f;
}

Tensor tensor_product(const Tensor& f, const Tensor& g) {
  require_same_space(f.space(), g.space(), "tensor_product");
  Tensor out(f.space(), f.order() + g.order());
  const std::size_t n = g.size();
  for (std::size_t a = 0; a < f.size(); ++a)
    for (std::size_t b = 0; b < n; ++b) out[a * n + b] = f[a] * g[b];
  return out;
}

Tensor apply_to_modes(const Tensor& t, const Eigen::MatrixXd& matrix, int first, int count) {
  const int d = t.dim();
  if (matrix.rows() != d || matrix.cols() != d)
    throw InvalidArgument("apply_to_modes: matrix must be d x d");
  if (first < 0 || count < 0 || first + count > t.order())
    throw InvalidArgument("apply_to_modes: mode range out of bounds");
  Tensor current = t;
  for (int mode = first; mode < first + count; ++mode) {
    Tensor next(t.space(), t.order());
    const std::size_t outer = ipow(static_cast<std::size_t>(d), mode);
    const std::size_t inner = ipow(static_cast<std::size_t>(d), t.order() - 1 - mode);
    const std::size_t block = static_cast<std::size_t>(d) * inner;
    for (std::size_t o = 0; o < outer; ++o) {
      Eigen::Map<const RowMatrix> src(current.data().data() + o * block, d, static_cast<Eigen::Index>(inner));
      Eigen::Map<RowMatrix> dst(next.data().data() + o * block, d, static_cast<Eigen::Index>(inner));
      dst.noalias() = matrix * src;
    }
    current = std::move(next);
  }
  return current;
}

Tensor contract(const Tensor& f, const Tensor& g, int r) {
  require_same_space(f.space(), g.space(), "contract");
  if (r < 0 || r > std::min(f.order(), g.order()))
    throw InvalidContraction("contract: r = " + std::to_string(r) + " outside [0, min(p, q)]");
  const auto d = static_cast<std::size_t>(f.dim());
  const Tensor paired = f.space()->is_identity()
                            ? g
                            : apply_to_modes(g, f.space()->gram(), g.order() - r, r);
  const std::size_t shared = ipow(d, r);
  const std::size_t rows = ipow(d, f.order() - r);
  const std::size_t cols = ipow(d, g.order() - r);
  Tensor out(f.space(), f.order() + g.order() - 2 * r);
  Eigen::Map<const RowMatrix> fm(f.data().data(), static_cast<Eigen::Index>(rows),
                                 static_cast<Eigen::Index>(shared));
  Eigen::Map<const RowMatrix> gm(paired.data().data(), static_cast<Eigen::Index>(cols),
                                 static_cast<Eigen::Index>(shared));
  Eigen::Map<RowMatrix> om(out.data().data(), static_cast<Eigen::Index>(rows),
                           static_cast<Eigen::Index>(cols));
  om.noalias() = fm * gm.transpose();
  return out;
}

Tensor contract(const SymKernel& f, const SymKernel& g, int r) {
  require_same_space(f.space(), g.space(), "contract");
  if (r < 0 || r > std::min(f.order(), g.order()))
    throw InvalidContraction("contract: r = " + std::to_string(r) + " outside [0, min(p, q)]");
  return contract(to_tensor(f), to_tensor(g), r);
}

SymKernel contract_sym(const SymKernel& f, const SymKernel& g, int r) {
  return symmetrize(contract(f, g, r));
}

double gram_inner(const Tensor& f, const Tensor& g) {
  require_same_space(f.space(), g.space(), "gram_inner");
  if (f.order() != g.order()) throw InvalidOrder("gram_inner: order mismatch");
  const Tensor weighted = f.space()->is_identity() ? g : apply_to_modes(g, f.space()->gram(), 0, g.order());
  double sum = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) sum += f[k] * weighted[k];
  return sum;
}

double gram_inner(const SymKernel& f, const SymKernel& g) {
  require_same_space(f.space(), g.space(), "gram_inner");
  if (f.order() != g.order()) throw InvalidOrder("gram_inner: order mismatch");
  if (!f.space()->is_identity()) return gram_inner(to_tensor(f), to_tensor(g));
  auto gc = g.packed();
  double sum = 0.0;
  std::size_t k = 0;
  f.for_each([&](std::span<const int> m, double c) {
    sum += c * gc[k++] / ordering_count(m);
  });
  return sum;
}

double norm_squared(const Tensor& f) { return gram_inner(f, f); }
double norm_squared(const SymKernel& f) { return gram_inner(f, f); }
double norm(const Tensor& f) { return std::sqrt(std::max(0.0, norm_squared(f))); }
double norm(const SymKernel& f) { return std::sqrt(std::max(0.0, norm_squared(f))); }

}  // namespace chaosbound
