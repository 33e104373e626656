#pragma once

#include "chaosbound/chaos.hpp"
#include "chaosbound/wick.hpp"

namespace chaosbound::testing {

/// E[(a + b F - c ||DF||^2)^2] with every quantity taken from the polynomial
/// form of F (no contraction or product formula involved).
inline double oracle_square(const ChaosVector& F, double a, double b, double c) {
  const GramSpace& space = *F.space();
  const Polynomial P = to_polynomial(F);
  const Polynomial X = Polynomial(P.dim(), a) + P * b + derivative_norm_sq(P, space) * (-c);
  return gaussian_expectation(X * X, space);
}

/// E[(1 - q^{-1} ||DF||^2)^2] for F in the q-th chaos.
inline double oracle_gauss(const ChaosVector& F, int q) { return oracle_square(F, 1.0, 0.0, 1.0 / q); }

/// E[(2 nu + 2F - q^{-1} ||DF||^2)^2].
inline double oracle_gamma(const ChaosVector& F, int q, double nu) {
  return oracle_square(F, 2.0 * nu, 2.0, 1.0 / q);
}

}  // namespace chaosbound::testing
