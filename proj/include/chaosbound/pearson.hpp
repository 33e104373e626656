#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "chaosbound/quadrature.hpp"

namespace chaosbound {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Quadratic tau(x) = alpha x^2 + beta x + gamma on the support (a, b), a < 0 < b.
struct PearsonSpec {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 1.0;
  double a = -kInf;
  double b = kInf;

  double tau(double x) const;  // zero outside (a, b)
  /// Checks tau > 0 on (a, b) and tau = 0 at finite endpoints.
  void validate() const;

  static PearsonSpec gaussian();
  static PearsonSpec centered_gamma(double nu);  // tau = 2 (x + nu)_+
  static PearsonSpec uniform();                  // tau = (1 - x^2) / 2 on (-1, 1)
};

/// tau together with the exponent Phi(x) = int_0^x y / tau(y) dy.
class TauModel {
 public:
  /// Closed-form exponent.
  explicit TauModel(const PearsonSpec& spec);
  /// Exponent by quadrature; tau must be positive on (a, b).
  TauModel(RealFunction tau, double a, double b);

  double a() const { return a_; }
  double b() const { return b_; }
  double tau(double x) const;
  double exponent(double x) const;
  /// -Phi(x) - log tau(x) at a quadrature node; the node offsets keep it
  /// accurate next to a finite endpoint where tau vanishes.
  double log_weight(const Node& n) const;
  const std::optional<PearsonSpec>& spec() const { return spec_; }

 private:
  RealFunction tau_;
  double a_;
  double b_;
  std::optional<PearsonSpec> spec_;
};

/// Density on (a, b), zero outside.
struct DensityModel {
  double a = -kInf;
  double b = kInf;
  RealFunction pdf;
  double normalization = 1.0;
  /// Optional evaluation at quadrature nodes, accurate next to singular endpoints.
  NodeFunction pdf_node;

  double operator()(double x) const { return (x > a && x < b) ? pdf(x) : 0.0; }

  /// int x^k p(x) dx.
  double moment(int k) const;

  static DensityModel standard_normal();
  static DensityModel centered_gamma(double nu);  // law of 2 G(nu/2) - nu
  static DensityModel uniform(double half_width = 1.0);
};

/// tau(x) = int_x^b y p(y) dy / p(x) inside the support and 0 outside. When
/// a = -inf the equal form -int_a^x y p(y) dy / p(x) is used for x < 0. Checks that p
/// has mass one, mean zero and is positive inside the support.
RealFunction tau_from_density(const DensityModel& p);

/// p(x) = exp(-Phi(x)) / (C tau(x)) on (a, b).
DensityModel density_from_tau(const TauModel& model);

/// Bounded piecewise-continuous test function; breakpoints mark its jumps.
struct TestFunction {
  RealFunction h;
  std::vector<double> breakpoints;
};

/// Solution U of tau(x) U'(x) - x U(x) = h(x) - E_tau h, bounded on (a, b)
/// and equal to (h(x) - E_tau h) / x outside.
class SteinSolution {
 public:
  SteinSolution(TauModel model, TestFunction h);

  const TauModel& model() const { return model_; }
  const TestFunction& test_function() const { return h_; }
  double expectation() const { return eh_; }

  double value(double x) const;
  /// U'(x) from the equation inside the support, a central difference outside.
  double derivative(double x) const;
  /// tau(x) U'(x) = x U(x) + h(x) - E_tau h inside the support, 0 outside.
  double tau_derivative(double x) const;

  struct Row {
    double x;
    double value;
    double derivative;
  };
  std::vector<Row> tabulate(const std::vector<double>& grid) const;

 private:
  TauModel model_;
  TestFunction h_;
  double eh_;
};

SteinSolution stein_solve(const TauModel& model, const TestFunction& h);

struct SteinBoundCheck {
  double sup_xU = 0.0;
  double sup_tauU = 0.0;
  double sup_sum = 0.0;      // sup of |xU| + |tau U'|
  double sup_h = 0.0;
  double K = 6.0;            // 2 max{3, 1/|a|, 1/|b|}
  bool pass6 = false;        // sup over the support <= 6 sup|h|
  bool passK = false;        // sup over the grid <= K sup|h|
};

/// Default grid: interior points of the support plus points outside it.
std::vector<double> stein_grid(const TauModel& model, int points = 801);

SteinBoundCheck stein_bound_check(const SteinSolution& sol, const std::vector<double>& grid);
SteinBoundCheck stein_bound_check(const SteinSolution& sol);

struct PearsonCoefficients {
  // p'/p = (a0 + a1 x) / (b0 + b1 x + b2 x^2), derived from tau p = int_x^b y p.
  double a0, a1, b0, b1, b2;
  // Signs as printed in the classification theorem: a0 = beta, a1 = 2 alpha + 1.
  double printed_a0, printed_a1;

  double log_derivative(double x) const { return (a0 + a1 * x) / (b0 + b1 * x + b2 * x * x); }
};

PearsonCoefficients pearson_classify(const PearsonSpec& spec);

/// E[tau(Z) f'(Z) - Z f(Z)] under the density of the model.
double char_residual(const TauModel& model, const RealFunction& f, const RealFunction& df);

}  // namespace chaosbound
