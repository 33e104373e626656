#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chaosbound/bounds.hpp"

namespace chaosbound {

/// Autocovariance of normalized fBm increments,
/// rho_H(k) = (|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H}) / 2.
double rho(double H, std::int64_t k);

/// sigma = sqrt((1/q!) sum_{t in Z} rho_H(t)^q); finite iff H < (2q-1)/(2q).
double sigma(double H, int q);

/// Normalization of the quadratic-variation statistic, sigma_H = 2 sigma(H, 2).
double sigma_quadratic(double H);

struct BmInstance {
  double H = 0.5;
  int q = 2;
  int n = 1;
};

void validate(const BmInstance& inst);

enum class BmPath {
  Auto,           // fast path for q = 2 above kFastPathThreshold, difference sums otherwise
  Naive,          // four nested index loops
  DifferenceSum,  // stationarity: O(n^3) sum over index differences
  Fast,           // q = 2 only: ||R^2||_F^2 in O(n^2)
};

inline constexpr int kFastPathThreshold = 256;

struct BmOptions {
  BmPath path = BmPath::Auto;
  /// Upper limit on inner-loop evaluations before a ComplexityError.
  double operation_budget = 2e10;
};

/// Exact E[(1 - q^{-1} ||DZ_n||^2)^2] for the Breuer-Major statistic Z_n,
/// reported as a Kolmogorov bound with symmetrized contractions.
BoundReport bm_bound_exact(const BmInstance& inst, const BmOptions& options = {});

struct BmRate {
  double exponent;
  std::string regime;
};

/// Decay exponent e of the Kolmogorov bound, bound <= C n^{-e}.
BmRate bm_rate(double H, int q);

struct BmRow {
  int n;
  double exact_bound;
  double predicted;  // n^{-e}
  BoundReport report;
};

std::vector<BmRow> bm_table(double H, int q, const std::vector<int>& ns, const BmOptions& options = {});

/// Explicit kernel f_n = (n^{qH-1/2} / (q! sigma)) sum_k delta_k^{(x)q} over the
/// space with Gram matrix G[k][l] = n^{-2H} rho_H(k - l).
SymKernel breuer_major_kernel(const BmInstance& inst);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace chaosbound
