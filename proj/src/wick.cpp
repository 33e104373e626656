#include "chaosbound/wick.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chaosbound/error.hpp"

namespace chaosbound {

Polynomial::Polynomial(int dim, double constant) : dim_(dim) {
  if (dim <= 0) throw InvalidArgument("Polynomial: dimension must be positive");
  if (constant != 0.0) terms_[Exponents(static_cast<std::size_t>(dim), 0)] = constant;
}

int Polynomial::degree() const {
  int deg = 0;
  for (const auto& [e, c] : terms_) {
    int total = 0;
    for (int k : e) total += k;
    deg = std::max(deg, total);
  }
  return deg;
}

void Polynomial::add_term(const Exponents& exponents, double coefficient) {
  if (static_cast<int>(exponents.size()) != dim_) throw InvalidArgument("Polynomial: exponent length mismatch");
  if (coefficient == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(exponents, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial Polynomial::derivative(int i) const {
  if (i < 0 || i >= dim_) throw InvalidArgument("Polynomial::derivative: index out of range");
  Polynomial out(dim_);
  for (const auto& [e, c] : terms_) {
    const auto k = static_cast<std::size_t>(i);
    if (e[k] == 0) continue;
    Exponents lowered = e;
    --lowered[k];
    out.add_term(lowered, c * e[k]);
  }
  return out;
}

double Polynomial::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw InvalidArgument("Polynomial: evaluation dimension mismatch");
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double v = c;
    for (std::size_t k = 0; k < e.size(); ++k)
      for (int p = 0; p < e[k]; ++p) v *= x[k];
    sum += v;
  }
  return sum;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.dim_ != dim_) throw SpaceMismatch("Polynomial: dimension mismatch");
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.dim_ != b.dim_) throw SpaceMismatch("Polynomial: dimension mismatch");
  Polynomial out(a.dim_);
  Polynomial::Exponents e(static_cast<std::size_t>(a.dim_));
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

namespace {

class WickExpander {
 public:
  explicit WickExpander(const GramSpace& space) : space_(space) {}

  // Wick product :X_{m_1} ... X_{m_q}: for a sorted index list m.
  const Polynomial& product(const std::vector<int>& m) {
    if (auto it = memo_.find(m); it != memo_.end()) return it->second;
    const int d = space_.dim();
    Polynomial result(d);
    if (m.empty()) {
      result = Polynomial(d, 1.0);
    } else {
      const int a = m.front();
      const std::vector<int> rest(m.begin() + 1, m.end());
      Polynomial xa(d);
      Polynomial::Exponents e(static_cast<std::size_t>(d), 0);
      e[static_cast<std::size_t>(a)] = 1;
      xa.add_term(e, 1.0);
      result = xa * product(rest);
      for (std::size_t k = 0; k < rest.size(); ++k) {
        const double g = space_.gram()(a, rest[k]);
        if (g == 0.0) continue;
        std::vector<int> dropped = rest;
        dropped.erase(dropped.begin() + static_cast<std::ptrdiff_t>(k));
        result += product(dropped) * (-g);
      }
    }
    return memo_.emplace(m, std::move(result)).first->second;
  }

 private:
  const GramSpace& space_;
  std::map<std::vector<int>, Polynomial> memo_;
};

class IsserlisMoments {
 public:
  explicit IsserlisMoments(const GramSpace& space) : gram_(space.gram()) {}

  double operator()(Polynomial::Exponents alpha) {
    int total = 0;
    for (int k : alpha) total += k;
    if (total == 0) return 1.0;
    if (total % 2 == 1) return 0.0;
    if (auto it = memo_.find(alpha); it != memo_.end()) return it->second;
    const auto i = static_cast<std::size_t>(std::find_if(alpha.begin(), alpha.end(), [](int k) { return k > 0; }) -
                                            alpha.begin());
    Polynomial::Exponents reduced = alpha;
    --reduced[i];
    double sum = 0.0;
    for (std::size_t j = 0; j < reduced.size(); ++j) {
      if (reduced[j] == 0) continue;
      const double g = gram_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (g == 0.0) continue;
      Polynomial::Exponents next = reduced;
      const int mult = next[j];
      --next[j];
      sum += mult * g * (*this)(std::move(next));
    }
    memo_.emplace(std::move(alpha), sum);
    return sum;
  }

 private:
  const Eigen::MatrixXd& gram_;
  std::map<Polynomial::Exponents, double> memo_;
};

}  // namespace

Polynomial to_polynomial(const ChaosVector& F) {
  const GramSpace& space = *F.space();
  WickExpander wick(space);
  Polynomial out(space.dim(), F.constant());
  for (const SymKernel& f : F.terms()) {
    f.for_each([&](std::span<const int> m, double c) {
      if (c == 0.0) return;
      out += wick.product(std::vector<int>(m.begin(), m.end())) * c;
    });
  }
  return out;
}

double gaussian_expectation(const Polynomial& P, const GramSpace& space) {
  if (P.dim() != space.dim()) throw SpaceMismatch("gaussian_expectation: dimension mismatch");
  if (P.degree() > kMaxWickDegree)
    throw ComplexityError("gaussian_expectation: degree " + std::to_string(P.degree()) + " exceeds " +
                          std::to_string(kMaxWickDegree));
  IsserlisMoments moments(space);
  double sum = 0.0;
  for (const auto& [e, c] : P.terms()) sum += c * moments(e);
  return sum;
}

Polynomial derivative_norm_sq(const Polynomial& P, const GramSpace& space) {
  const int d = space.dim();
  if (P.dim() != d) throw SpaceMismatch("derivative_norm_sq: dimension mismatch");
  std::vector<Polynomial> grad;
  grad.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) grad.push_back(P.derivative(i));
  Polynomial out(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double g = space.gram()(i, j);
      if (g == 0.0) continue;
      out += (grad[static_cast<std::size_t>(i)] * grad[static_cast<std::size_t>(j)]) * g;
    }
  }
  return out;
}

double exact_moment(const ChaosVector& F, int s) {
  if (s < 0) throw InvalidArgument("exact_moment: s must be >= 0");
  if (F.max_order() * s > kMaxWickDegree)
    throw ComplexityError("exact_moment: degree " + std::to_string(F.max_order()) + " times power " +
                          std::to_string(s) + " exceeds " + std::to_string(kMaxWickDegree));
  const Polynomial P = to_polynomial(F);
  Polynomial power(P.dim(), 1.0);
  for (int k = 0; k < s; ++k) power = power * P;
  return gaussian_expectation(power, *F.space());
}

double exact_expectation(std::span<const ChaosVector> factors) {
  if (factors.empty()) return 1.0;
  int degree = 0;
  for (const auto& F : factors) {
    require_same_space(factors.front().space(), F.space(), "exact_expectation");
    degree += F.max_order();
  }
  if (degree > kMaxWickDegree)
    throw ComplexityError("exact_expectation: total degree " + std::to_string(degree) + " exceeds " +
                          std::to_string(kMaxWickDegree));
  Polynomial product(factors.front().space()->dim(), 1.0);
  for (const auto& F : factors) product = product * to_polynomial(F);
  return gaussian_expectation(product, *factors.front().space());
}

}  // namespace chaosbound
