#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chaosbound/chaos.hpp"

namespace chaosbound {

enum class Metric { Kolmogorov, TotalVariation, Wasserstein, FortetMourier, H1, H2 };

std::string to_string(Metric metric);
Metric parse_metric(std::string_view name);

/// One addend of the squared quantity; i and j index the chaos terms of a sum
/// (both 0 for single-chaos bounds).
struct ContractionTerm {
  int r = 0;
  double value = 0.0;
  int i = 0;
  int j = 0;
};

struct BoundReport {
  Metric metric = Metric::Kolmogorov;
  double variance_term = 0.0;
  std::vector<ContractionTerm> contraction_terms;
  double squared_total = 0.0;
  double metric_constant = 1.0;
  double bound = 0.0;
  /// Gaussian single chaos: the weaker bound with unsymmetrized contractions.
  std::optional<double> unsymmetrized_squared_total;
  /// Gamma single chaos: the exact value with symmetrized contractions.
  std::optional<double> symmetrized_squared_total;
};

/// Distance constant for Gaussian targets: 1 (Kolmogorov, Wasserstein),
/// 2 (total variation), 4 (Fortet-Mourier).
double gauss_metric_constant(Metric metric);

struct SteinConstants {
  std::optional<double> K1;  // only for integer nu
  double K2;
};

SteinConstants stein_constants(double nu);

/// c_q = 1 / ((q/2)! C(q-1, q/2-1)^2) for even q.
double gamma_cq(int q);

/// E[(1 - q^{-1} ||DF||^2)^2] for F = I_q(f), decomposed by contraction order.
BoundReport gauss_bound_single(const SymKernel& f, Metric metric);

/// Upper bound on E[(1 - <DZ, -DL^{-1}Z>)^2] for Z = sum_i I_{q_i}(f_i).
BoundReport gauss_bound_sum(const std::vector<SymKernel>& terms, Metric metric);

/// Signed value (1/6)(m4 - 3) + (m2 - 1)(m2/2 - 3/2) = E[(1 - ||DF||^2/2)^2]
/// for F in the second chaos.
double second_chaos_gauss_interior(double m2, double m4);
double second_chaos_gauss_bound(double m2, double m4);

/// Signed value (m2 - 2nu)(4 - 3nu + m2/2) + (1/6)(m4 - 12 m3 - 12 nu^2 + 48 nu)
/// = E[(2F + 2nu - ||DF||^2/2)^2] for F in the second chaos.
double second_chaos_gamma_interior(double nu, double m2, double m3, double m4);
double second_chaos_gamma_bound(double nu, double m2, double m3, double m4);

/// Upper bound on E[(2nu + 2G - q^{-1} ||DG||^2)^2] for G = I_q(g), q even.
/// metric must be H1 (integer nu, constant K1) or H2 (constant K2).
BoundReport gamma_bound_single(const SymKernel& g, double nu, Metric metric);

/// Upper bound for Z = I_{q1}(f1) + I_{q2}(f2) against F(nu1 + nu2); needs
/// even orders with q2 > 2 q1.
BoundReport gamma_bound_sum(const SymKernel& f1, double nu1, const SymKernel& f2, double nu2,
                            Metric metric = Metric::H2);

/// 8 sqrt(2) ||f (x)_1 f|| + sqrt(2 pi E[(2 + 2H - ||DH||^2/4)^2]) with
/// H = I_4(f (x)~ f), for f of order 2.
double chi2_double_bound(const SymKernel& f);

}  // namespace chaosbound
