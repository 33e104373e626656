#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "chaosbound/sym_kernel.hpp"

namespace chaosbound {

/// Hermite polynomial normalized as H_q = He_q / q!, where He_q is the monic
/// (probabilists') Hermite polynomial. H_2(x) = (x^2 - 1) / 2.
double hermite(int q, double x);

/// Monic Hermite polynomial He_q(x) by the three-term recurrence.
double hermite_monic(int q, double x);

/// Finite chaos expansion c_0 + sum_i I_{q_i}(f_i) with strictly increasing
/// orders q_i >= 1 over one shared space.
class ChaosVector {
 public:
  explicit ChaosVector(SpacePtr space, double constant = 0.0);

  /// Single multiple integral I_q(f); order 0 kernels become the constant.
  static ChaosVector single(const SymKernel& f);

  const SpacePtr& space() const { return space_; }
  double constant() const { return constant_; }
  void set_constant(double c) { constant_ = c; }

  /// Terms ordered by increasing order; never contains order 0.
  const std::vector<SymKernel>& terms() const { return terms_; }

  /// Adds I_q(f) (merging with an existing term of the same order).
  void add(const SymKernel& f);

  const SymKernel* term(int order) const;
  int max_order() const;
  bool is_centered() const { return constant_ == 0.0; }

  ChaosVector& operator+=(const ChaosVector& other);
  ChaosVector& operator-=(const ChaosVector& other);
  ChaosVector& operator*=(double s);

  friend ChaosVector operator+(ChaosVector a, const ChaosVector& b) { return a += b; }
  friend ChaosVector operator-(ChaosVector a, const ChaosVector& b) { return a -= b; }
  friend ChaosVector operator*(ChaosVector a, double s) { return a *= s; }
  friend ChaosVector operator*(double s, ChaosVector a) { return a *= s; }

 private:
  SpacePtr space_;
  double constant_;
  std::vector<SymKernel> terms_;
};

/// Pathwise evaluation of a chaos expansion.
///
/// Kernels are mapped once to the orthonormal frame given by the factor L of
/// G = L L^T; afterwards I_q(sym(eps_m)) = prod_j He_{k_j}(xi_j), where k_j
/// are the multiplicities of m. Evaluation is reentrant.
class ChaosEvaluator {
 public:
  explicit ChaosEvaluator(const ChaosVector& F);

  int dim() const { return dim_; }

  /// xi: i.i.d. standard normal coordinates in the orthonormal frame.
  double operator()(std::span<const double> xi) const;

 private:
  struct Monomial {
    std::vector<std::pair<int, int>> powers;  // (coordinate, multiplicity)
    double coefficient;
  };
  int dim_;
  int max_order_ = 0;
  double constant_;
  std::vector<Monomial> monomials_;
};

double eval_chaos(const ChaosVector& F, std::span<const double> xi);

/// E[F^2] = c_0^2 + sum q! ||f_q||^2.
double second_moment(const ChaosVector& F);

/// E[F G] via the isometry and orthogonality of the chaoses.
double chaos_inner(const ChaosVector& F, const ChaosVector& G);

/// Product formula: I_p(f) I_q(g) = sum_r r! C(p,r) C(q,r) I_{p+q-2r}(f (x)~_r g).
ChaosVector multiply(const SymKernel& f, const SymKernel& g);

/// Product of two finite expansions, distributed term by term.
ChaosVector multiply(const ChaosVector& F, const ChaosVector& G);

/// Chaos expansion of <DF, -DL^{-1}F>. Requires a centered F.
ChaosVector malliavin_inner(const ChaosVector& F);

/// Chaos expansion of ||DF||^2 (constant part included).
ChaosVector derivative_norm_sq(const ChaosVector& F);

/// Ornstein-Uhlenbeck semigroup: every order-q term scaled by exp(-q z).
ChaosVector ou_semigroup(const ChaosVector& F, double z);

}  // namespace chaosbound
