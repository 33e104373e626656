#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chaosbound/quadrature.hpp"

namespace chaosbound {

/// Rows per random stream. Stream b is keyed by (seed, b), so the output
/// does not depend on how batches are spread over worker threads.
inline constexpr int kBatchRows = 1024;

/// Sizes above this use circulant embedding instead of Cholesky.
inline constexpr int kCirculantThreshold = 1024;

struct SimOptions {
  int threads = 1;
  /// Forces the Cholesky generator at every size.
  bool force_cholesky = false;
};

struct SampleBatch {
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::string meta;  // generator description
};

struct FbmSample {
  Eigen::MatrixXd increments;  // count x n, one draw per row
  std::uint64_t seed = 0;
  std::string meta;
};

/// Draws of the normalized increment vector (n^H (B_{(k+1)/n} - B_{k/n}))_{k<n},
/// a stationary Gaussian vector with autocovariance rho_H.
FbmSample sample_fbm_increments(double H, int n, int count, std::uint64_t seed, const SimOptions& options = {});

/// Draws of Z_n = (1 / (sigma sqrt(n))) sum_k H_q(V_k) with H_q = He_q / q!.
SampleBatch sample_Zn(double H, int q, int n, int count, std::uint64_t seed, const SimOptions& options = {});

/// sup_z |F_emp(z) - cdf(z)|, checked on both sides of every jump.
double empirical_kolmogorov(std::span<const double> samples, const RealFunction& cdf);

/// Mean |x_(i) - quantile((i - 1/2) / N)| over the order statistics.
double empirical_wasserstein(std::span<const double> samples, const RealFunction& quantile);

/// Half-width sqrt(ln(2 / delta) / (2 N)) of the DKW confidence band.
double dkw_allowance(std::size_t samples, double delta = 0.01);

double standard_normal_cdf(double x);
double standard_normal_quantile(double p);

using Gradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// S(v) = int_0^1 E[<grad g(v), grad g(sqrt(t) v + sqrt(1 - t) V)>] dt / (2 sqrt(t)),
/// computed with u = sqrt(t), Gauss-Legendre in u and Monte Carlo over V ~ N(0, I).
McEstimate chatterjee_weight(const Gradient& grad, const Eigen::VectorXd& v, int t_nodes, int mc_count,
                             std::uint64_t seed);

struct IdentityCheck {
  McEstimate lhs;  // E[Y f(Y)]
  McEstimate rhs;  // E[S(V) f'(Y)]
  /// |lhs - rhs| in units of the combined standard error.
  double z_score() const;
};

/// Both sides of E[Y f(Y)] = E[S(V) f'(Y)] for Y = g(V), V ~ N(0, I_dim).
IdentityCheck chatterjee_identity(const std::function<double(const Eigen::VectorXd&)>& g, const Gradient& grad,
                                  const RealFunction& f, const RealFunction& df, int dim, int samples,
                                  std::uint64_t seed, int t_nodes = 8, int inner_count = 16);

}  // namespace chaosbound
