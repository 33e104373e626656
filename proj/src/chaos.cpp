#include "chaosbound/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chaosbound/error.hpp"
#include "chaosbound/tensor.hpp"

namespace chaosbound {

namespace {

double factorial(int n) { return std::tgamma(static_cast<double>(n) + 1.0); }

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(factorial(n) / (factorial(k) * factorial(n - k)));
}

}  // namespace

double hermite_monic(int q, double x) {
  if (q < 0) throw InvalidOrder("hermite: order must be >= 0, got " + std::to_string(q));
  if (q == 0) return 1.0;
  double prev = 1.0;
  double curr = x;
  for (int k = 1; k < q; ++k) {
    const double next = x * curr - k * prev;
    prev = curr;
    curr = next;
  }
  return curr;
}

double hermite(int q, double x) { return hermite_monic(q, x) / factorial(q); }

ChaosVector::ChaosVector(SpacePtr space, double constant) : space_(std::move(space)), constant_(constant) {
  if (!space_) throw InvalidArgument("ChaosVector: null space");
}

ChaosVector ChaosVector::single(const SymKernel& f) {
  ChaosVector F(f.space());
  F.add(f);
  return F;
}

void ChaosVector::add(const SymKernel& f) {
  require_same_space(space_, f.space(), "ChaosVector::add");
  if (f.order() == 0) {
    constant_ += f.packed()[0];
    return;
  }
  auto it = std::lower_bound(terms_.begin(), terms_.end(), f.order(),
                             [](const SymKernel& k, int order) { return k.order() < order; });
  if (it != terms_.end() && it->order() == f.order()) {
    *it += f;
  } else {
    terms_.insert(it, f);
  }
}

const SymKernel* ChaosVector::term(int order) const {
  for (const auto& k : terms_)
    if (k.order() == order) return &k;
  return nullptr;
}

int ChaosVector::max_order() const { return terms_.empty() ? 0 : terms_.back().order(); }

ChaosVector& ChaosVector::operator+=(const ChaosVector& other) {
  require_same_space(space_, other.space_, "ChaosVector::operator+=");
  constant_ += other.constant_;
  for (const auto& k : other.terms_) add(k);
  return *this;
}

ChaosVector& ChaosVector::operator-=(const ChaosVector& other) { return *this += other * -1.0; }

ChaosVector& ChaosVector::operator*=(double s) {
  constant_ *= s;
  for (auto& k : terms_) k *= s;
  return *this;
}

ChaosEvaluator::ChaosEvaluator(const ChaosVector& F)
    : dim_(F.space()->dim()), constant_(F.constant()) {
  const SpacePtr& space = F.space();
  const Eigen::MatrixXd frame = space->factor().transpose();
  for (const SymKernel& f : F.terms()) {
    max_order_ = std::max(max_order_, f.order());
    const SymKernel orthonormal =
        space->is_identity() ? f : symmetrize(apply_to_modes(to_tensor(f), frame, 0, f.order()));
    // symmetrize() of a symmetric tensor returns stored coefficients c_m.
    orthonormal.for_each([&](std::span<const int> m, double c) {
      if (c == 0.0) return;
      Monomial mono{{}, c};
      for (std::size_t k = 0; k < m.size(); ++k) {
        if (!mono.powers.empty() && mono.powers.back().first == m[k])
          ++mono.powers.back().second;
        else
          mono.powers.emplace_back(m[k], 1);
      }
      monomials_.push_back(std::move(mono));
    });
  }
}

double ChaosEvaluator::operator()(std::span<const double> xi) const {
  if (static_cast<int>(xi.size()) != dim_)
    throw InvalidArgument("eval_chaos: coordinate vector has dimension " + std::to_string(xi.size()) +
                          ", expected " + std::to_string(dim_));
  // He_k(xi_j) for k <= max order, computed lazily per coordinate.
  const int width = max_order_ + 1;
  std::vector<double> table(static_cast<std::size_t>(dim_ * width), 0.0);
  std::vector<char> ready(static_cast<std::size_t>(dim_), 0);
  auto he = [&](int j, int k) {
    const auto base = static_cast<std::size_t>(j * width);
    if (!ready[static_cast<std::size_t>(j)]) {
      const double x = xi[static_cast<std::size_t>(j)];
      table[base] = 1.0;
      if (width > 1) table[base + 1] = x;
      for (int m = 2; m < width; ++m)
        table[base + static_cast<std::size_t>(m)] =
            x * table[base + static_cast<std::size_t>(m - 1)] - (m - 1) * table[base + static_cast<std::size_t>(m - 2)];
      ready[static_cast<std::size_t>(j)] = 1;
    }
    return table[base + static_cast<std::size_t>(k)];
  };
  double value = constant_;
  for (const Monomial& mono : monomials_) {
    double prod = mono.coefficient;
    for (const auto& [j, k] : mono.powers) prod *= he(j, k);
    value += prod;
  }
  return value;
}

double eval_chaos(const ChaosVector& F, std::span<const double> xi) { return ChaosEvaluator(F)(xi); }

double chaos_inner(const ChaosVector& F, const ChaosVector& G) {
  require_same_space(F.space(), G.space(), "chaos_inner");
  double sum = F.constant() * G.constant();
  for (const SymKernel& f : F.terms())
    if (const SymKernel* g = G.term(f.order())) sum += factorial(f.order()) * gram_inner(f, *g);
  return sum;
}

double second_moment(const ChaosVector& F) { return chaos_inner(F, F); }

ChaosVector multiply(const SymKernel& f, const SymKernel& g) {
  require_same_space(f.space(), g.space(), "multiply");
  const int p = f.order();
  const int q = g.order();
  ChaosVector out(f.space());
  for (int r = 0; r <= std::min(p, q); ++r) {
    SymKernel term = contract_sym(f, g, r);
    term *= factorial(r) * binomial(p, r) * binomial(q, r);
    out.add(term);
  }
  return out;
}

ChaosVector multiply(const ChaosVector& F, const ChaosVector& G) {
  require_same_space(F.space(), G.space(), "multiply");
  ChaosVector out(F.space(), F.constant() * G.constant());
  for (const SymKernel& g : G.terms()) out.add(g * F.constant());
  for (const SymKernel& f : F.terms()) {
    out.add(f * G.constant());
    for (const SymKernel& g : G.terms()) out += multiply(f, g);
  }
  return out;
}

namespace {

// sum_{i,j} weight(q_i, q_j) sum_{r=1}^{q_i ^ q_j} (r-1)! C(q_i-1,r-1) C(q_j-1,r-1) I(f_i (x)~_r f_j)
template <class Weight>
ChaosVector derivative_pairing(const ChaosVector& F, Weight weight) {
  ChaosVector out(F.space());
  const auto& terms = F.terms();
  for (const SymKernel& fi : terms) {
    for (const SymKernel& fj : terms) {
      const int qi = fi.order();
      const int qj = fj.order();
      for (int r = 1; r <= std::min(qi, qj); ++r) {
        const double c = weight(qi, qj) * factorial(r - 1) * binomial(qi - 1, r - 1) * binomial(qj - 1, r - 1);
        out.add(contract_sym(fi, fj, r) * c);
      }
    }
  }
  return out;
}

}  // namespace

ChaosVector malliavin_inner(const ChaosVector& F) {
  if (!F.is_centered())
    throw InvalidArgument("malliavin_inner: input must be centered (constant term " +
                          std::to_string(F.constant()) + ")");
  return derivative_pairing(F, [](int qi, int) { return static_cast<double>(qi); });
}

ChaosVector derivative_norm_sq(const ChaosVector& F) {
  return derivative_pairing(F, [](int qi, int qj) { return static_cast<double>(qi) * qj; });
}

ChaosVector ou_semigroup(const ChaosVector& F, double z) {
  if (!(z >= 0.0)) throw InvalidArgument("ou_semigroup: z must be >= 0");
  ChaosVector out(F.space(), F.constant());
  for (const SymKernel& f : F.terms()) out.add(f * std::exp(-f.order() * z));
  return out;
}

}  // namespace chaosbound
