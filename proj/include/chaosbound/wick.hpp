#pragma once

#include <map>
#include <span>
#include <vector>

#include "chaosbound/chaos.hpp"

namespace chaosbound {

/// Largest total degree the pairing oracle will enumerate.
inline constexpr int kMaxWickDegree = 16;

/// Real polynomial in the correlated Gaussian coordinates X_i = I_1(e_i),
/// keyed by exponent vectors.
class Polynomial {
 public:
  using Exponents = std::vector<int>;

  explicit Polynomial(int dim, double constant = 0.0);

  int dim() const { return dim_; }
  int degree() const;
  const std::map<Exponents, double>& terms() const { return terms_; }

  void add_term(const Exponents& exponents, double coefficient);

  /// Partial derivative with respect to X_i.
  Polynomial derivative(int i) const;

  double operator()(std::span<const double> x) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

 private:
  int dim_;
  std::map<Exponents, double> terms_;
};

/// Expands every I_q(f) as a Wick product in the correlated coordinates,
/// using :X_a Y: = X_a :Y: - sum_b G_ab :Y without b:.
Polynomial to_polynomial(const ChaosVector& F);

/// E[P(X)] for X ~ N(0, G) by Isserlis pairing with memoization.
/// Throws ComplexityError when the degree exceeds kMaxWickDegree.
double gaussian_expectation(const Polynomial& P, const GramSpace& space);

/// Polynomial form of ||DF||^2 = sum_ij G_ij dP/dX_i dP/dX_j.
Polynomial derivative_norm_sq(const Polynomial& P, const GramSpace& space);

/// E[F^s]; requires max_order(F) * s <= kMaxWickDegree.
double exact_moment(const ChaosVector& F, int s);

/// E[prod_k F_k] over expansions sharing one space.
double exact_expectation(std::span<const ChaosVector> factors);

}  // namespace chaosbound
