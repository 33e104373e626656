#include "chaosbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
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

double total(const BoundReport& report) {
  double sum = report.variance_term;
  for (const auto& t : report.contraction_terms) sum += t.value;
  return sum;
}

void finish(BoundReport& report, double constant) {
  report.squared_total = total(report);
  report.metric_constant = constant;
  report.bound = constant * std::sqrt(report.squared_total);
}

bool is_integer(double x) { return std::floor(x) == x; }

double gamma_constant(double nu, Metric metric) {
  const SteinConstants k = stein_constants(nu);
  if (metric == Metric::H2) return k.K2;
  if (metric == Metric::H1) {
    if (!k.K1) throw InvalidArgument("H1 metric requires a positive integer nu, got " + std::to_string(nu));
    return *k.K1;
  }
  throw InvalidArgument("Gamma bounds support the H1 and H2 metrics only, got " + to_string(metric));
}

// q_i^2 (r-1)!^2 C(q_i-1,r-1)^2 C(q_j-1,r-1)^2 (q_i+q_j-2r)!
double pair_weight(int qi, int qj, int r) {
  const double a = factorial(r - 1) * binomial(qi - 1, r - 1) * binomial(qj - 1, r - 1);
  return static_cast<double>(qi) * qi * a * a * factorial(qi + qj - 2 * r);
}

}  // namespace

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::Kolmogorov: return "Kolmogorov";
    case Metric::TotalVariation: return "TotalVariation";
    case Metric::Wasserstein: return "Wasserstein";
    case Metric::FortetMourier: return "FortetMourier";
    case Metric::H1: return "H1";
    case Metric::H2: return "H2";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  for (Metric m : {Metric::Kolmogorov, Metric::TotalVariation, Metric::Wasserstein, Metric::FortetMourier,
                   Metric::H1, Metric::H2})
    if (name == to_string(m)) return m;
  if (name == "Kol" || name == "kolmogorov") return Metric::Kolmogorov;
  if (name == "TV" || name == "tv") return Metric::TotalVariation;
  if (name == "W" || name == "wasserstein") return Metric::Wasserstein;
  if (name == "FM" || name == "fm") return Metric::FortetMourier;
  throw InvalidArgument("unknown metric '" + std::string(name) + "'");
}

double gauss_metric_constant(Metric metric) {
  switch (metric) {
    case Metric::Kolmogorov:
    case Metric::Wasserstein: return 1.0;
    case Metric::TotalVariation: return 2.0;
    case Metric::FortetMourier: return 4.0;
    default: break;
  }
  throw InvalidArgument("Gaussian bounds do not support the " + to_string(metric) + " metric");
}

SteinConstants stein_constants(double nu) {
  if (!(nu > 0.0)) throw InvalidArgument("stein_constants: nu must be > 0");
  const double tail = 1.0 / nu + 2.0 / (nu * nu);
  SteinConstants k{std::nullopt, std::max(1.0, tail)};
  if (is_integer(nu)) k.K1 = std::max(std::sqrt(2.0 * std::numbers::pi / nu), tail);
  return k;
}

double gamma_cq(int q) {
  if (q < 2 || q % 2 != 0) throw InvalidOrder("c_q requires an even order q >= 2");
  const double b = binomial(q - 1, q / 2 - 1);
  return 1.0 / (factorial(q / 2) * b * b);
}

BoundReport gauss_bound_single(const SymKernel& f, Metric metric) {
  const int q = f.order();
  if (q < 2) throw InvalidOrder("gauss_bound_single: order must be >= 2, got " + std::to_string(q));
  const double constant = gauss_metric_constant(metric);
  BoundReport report;
  report.metric = metric;
  const double v = 1.0 - factorial(q) * norm_squared(f);
  report.variance_term = v * v;
  double unsym = report.variance_term;
  for (int r = 1; r < q; ++r) {
    const double b = binomial(q - 1, r - 1);
    const double w = static_cast<double>(q) * q * factorial(2 * q - 2 * r) * std::pow(factorial(r - 1), 2) *
                     b * b * b * b;
    const Tensor raw = contract(f, f, r);
    report.contraction_terms.push_back({r, w * norm_squared(symmetrize(raw))});
    unsym += w * norm_squared(raw);
  }
  report.unsymmetrized_squared_total = unsym;
  finish(report, constant);
  return report;
}

BoundReport gauss_bound_sum(const std::vector<SymKernel>& terms, Metric metric) {
  const double constant = gauss_metric_constant(metric);
  if (terms.empty()) throw InvalidArgument("gauss_bound_sum: no terms");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    require_same_space(terms.front().space(), terms[i].space(), "gauss_bound_sum");
    if (terms[i].order() < 2) throw InvalidOrder("gauss_bound_sum: orders must be >= 2");
    for (std::size_t j = 0; j < i; ++j)
      if (terms[i].order() == terms[j].order())
        throw InvalidOrder("gauss_bound_sum: duplicate order " + std::to_string(terms[i].order()));
  }
  const auto s = static_cast<double>(terms.size());
  BoundReport report;
  report.metric = metric;
  double variance = 1.0;
  for (const auto& f : terms) variance -= factorial(f.order()) * norm_squared(f);
  report.variance_term = 2.0 * variance * variance;
  // ||f^i (x)_{q_i - r} f^i|| for every i and r
  std::vector<std::vector<double>> self(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const int qi = terms[i].order();
    self[i].resize(static_cast<std::size_t>(qi) + 1);
    for (int r = 1; r <= qi; ++r) self[i][static_cast<std::size_t>(r)] = norm(contract(terms[i], terms[i], qi - r));
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = 0; j < terms.size(); ++j) {
      const int qi = terms[i].order();
      const int qj = terms[j].order();
      for (int r = 1; r <= std::min(qi, qj); ++r) {
        if (r == qi && qi == qj) continue;
        const double value = 2.0 * s * s * pair_weight(qi, qj, r) * self[i][static_cast<std::size_t>(r)] *
                             self[j][static_cast<std::size_t>(r)];
        report.contraction_terms.push_back({r, value, static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }
  finish(report, constant);
  return report;
}

double second_chaos_gauss_interior(double m2, double m4) {
  return (m4 - 3.0) / 6.0 + (m2 - 1.0) * (0.5 * m2 - 1.5);
}

double second_chaos_gauss_bound(double m2, double m4) {
  if (!(m2 > 0.0)) throw InvalidArgument("second_chaos_gauss_bound: second moment must be > 0");
  return 2.0 * std::sqrt(std::abs(m4 - 3.0) / 6.0 + (3.0 + m2) / 2.0 * std::abs(m2 - 1.0));
}

double second_chaos_gamma_interior(double nu, double m2, double m3, double m4) {
  return (m2 - 2.0 * nu) * (4.0 - 3.0 * nu + 0.5 * m2) + (m4 - 12.0 * m3 - 12.0 * nu * nu + 48.0 * nu) / 6.0;
}

double second_chaos_gamma_bound(double nu, double m2, double m3, double m4) {
  if (!(nu > 0.0)) throw InvalidArgument("second_chaos_gamma_bound: nu must be > 0");
  const double constant = std::max({1.0, 1.0 / nu, 2.0 / (nu * nu)});
  return constant * std::sqrt(std::abs(m4 - 12.0 * m3 - 12.0 * nu * nu + 48.0 * nu) / 6.0 +
                              std::abs(8.0 - 6.0 * nu + m2) / 2.0 * std::abs(m2 - 2.0 * nu));
}

BoundReport gamma_bound_single(const SymKernel& g, double nu, Metric metric) {
  const int q = g.order();
  if (q < 2 || q % 2 != 0) throw InvalidOrder("gamma_bound_single: order must be even and >= 2");
  if (!(nu > 0.0)) throw InvalidArgument("gamma_bound_single: nu must be > 0");
  const double constant = gamma_constant(nu, metric);
  BoundReport report;
  report.metric = metric;
  const double v = 2.0 * nu - factorial(q) * norm_squared(g);
  report.variance_term = v * v;
  double sym = report.variance_term;
  for (int r = 1; r < q; ++r) {
    if (2 * r == q) continue;
    const double b = binomial(q - 1, r - 1);
    const double w = static_cast<double>(q) * q * factorial(2 * q - 2 * r) * std::pow(factorial(r - 1), 2) *
                     b * b * b * b;
    const Tensor raw = contract(g, g, r);
    report.contraction_terms.push_back({r, w * norm_squared(raw)});
    sym += w * norm_squared(symmetrize(raw));
  }
  const double cq = gamma_cq(q);
  const SymKernel middle = contract_sym(g, g, q / 2) * (1.0 / cq) - g;
  const double mid = 4.0 * factorial(q) * norm_squared(middle);
  report.contraction_terms.push_back({q / 2, mid});
  report.symmetrized_squared_total = sym + mid;
  finish(report, constant);
  return report;
}

BoundReport gamma_bound_sum(const SymKernel& f1, double nu1, const SymKernel& f2, double nu2, Metric metric) {
  require_same_space(f1.space(), f2.space(), "gamma_bound_sum");
  const int q1 = f1.order();
  const int q2 = f2.order();
  if (q1 < 2 || q1 % 2 != 0 || q2 % 2 != 0) throw InvalidOrder("gamma_bound_sum: orders must be even and >= 2");
  if (q1 >= q2) throw InvalidOrder("gamma_bound_sum: requires q1 < q2");
  if (q2 <= 2 * q1) throw InvalidOrder("gamma_bound_sum: requires q2 > 2 q1");
  if (!(nu1 > 0.0) || !(nu2 > 0.0)) throw InvalidArgument("gamma_bound_sum: nu1 and nu2 must be > 0");
  const double nu = nu1 + nu2;
  const double constant = gamma_constant(nu, metric);
  const SymKernel* f[2] = {&f1, &f2};
  BoundReport report;
  report.metric = metric;
  const double v = 2.0 * nu - factorial(q1) * norm_squared(f1) - factorial(q2) * norm_squared(f2);
  report.variance_term = 3.0 * v * v;
  for (int i = 0; i < 2; ++i) {
    const int q = f[i]->order();
    const double cq = gamma_cq(q);
    const SymKernel diff = contract_sym(*f[i], *f[i], q / 2) - *f[i] * cq;
    report.contraction_terms.push_back({q / 2, 24.0 / (cq * cq) * factorial(q) * norm_squared(diff), i, i});
  }
  std::vector<double> self[2];
  for (int i = 0; i < 2; ++i) {
    const int q = f[i]->order();
    self[i].resize(static_cast<std::size_t>(q) + 1);
    for (int r = 1; r <= q; ++r) self[i][static_cast<std::size_t>(r)] = norm(contract(*f[i], *f[i], q - r));
  }
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const int qi = f[i]->order();
      const int qj = f[j]->order();
      for (int r = 1; r <= std::min(qi, qj); ++r) {
        if (i == j && (r == qi || 2 * r == qi)) continue;
        const double value = 12.0 * pair_weight(qi, qj, r) * self[i][static_cast<std::size_t>(r)] *
                             self[j][static_cast<std::size_t>(r)];
        report.contraction_terms.push_back({r, value, i, j});
      }
    }
  }
  finish(report, constant);
  return report;
}

double chi2_double_bound(const SymKernel& f) {
  if (f.order() != 2) throw InvalidOrder("chi2_double_bound: kernel must have order 2");
  const double first = 8.0 * std::numbers::sqrt2 * norm(contract(f, f, 1));
  const ChaosVector H = ChaosVector::single(contract_sym(f, f, 0));
  ChaosVector X = H * 2.0 - malliavin_inner(H);
  X.set_constant(X.constant() + 2.0);
  return first + std::sqrt(2.0 * std::numbers::pi * second_moment(X));
}

}  // namespace chaosbound
