#include "chaosbound/breuer_major.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <gsl/gsl_sf_zeta.h>

#include "chaosbound/error.hpp"
#include "chaosbound/tensor.hpp"

namespace chaosbound {

namespace {

double factorial(int n) { return std::tgamma(static_cast<double>(n) + 1.0); }

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(factorial(n) / (factorial(k) * factorial(n - k)));
}

void check_hurst(double H) {
  if (!(H > 0.0 && H < 1.0)) throw InvalidArgument("Hurst index must lie in (0, 1), got " + std::to_string(H));
}

double critical_hurst(int q) { return (2.0 * q - 1.0) / (2.0 * q); }

// Generalized binomial C(x, m).
double gbinom(double x, int m) {
  double c = 1.0;
  for (int i = 0; i < m; ++i) c *= (x - i) / (i + 1);
  return c;
}

// rho_H(t) = t^{2H} sum_{m>=1} C(2H, 2m) t^{-2m}; coefficient list b_m = C(2H, 2m + 2).
std::vector<double> rho_series(double H, int terms) {
  std::vector<double> b(static_cast<std::size_t>(terms));
  for (int m = 0; m < terms; ++m) b[static_cast<std::size_t>(m)] = gbinom(2.0 * H, 2 * m + 2);
  return b;
}

constexpr std::int64_t kSeriesLag = 64;
constexpr std::int64_t kSigmaDirect = 4096;

}  // namespace

double rho(double H, std::int64_t k) {
  check_hurst(H);
  const double t = static_cast<double>(k < 0 ? -k : k);
  if (t < kSeriesLag) {
    const double e = 2.0 * H;
    return 0.5 * (std::pow(t + 1.0, e) + std::pow(std::abs(t - 1.0), e) - 2.0 * std::pow(t, e));
  }
  // Direct formula cancels badly at large lags; the series converges like t^{-2m}.
  const double inv2 = 1.0 / (t * t);
  double sum = 0.0;
  double p = inv2;
  for (int m = 1; m <= 12; ++m) {
    const double term = gbinom(2.0 * H, 2 * m) * p;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    p *= inv2;
  }
  return std::pow(t, 2.0 * H) * sum;
}

double sigma(double H, int q) {
  check_hurst(H);
  if (q < 1) throw InvalidOrder("sigma: q must be >= 1");
  if (H >= critical_hurst(q))
    throw DivergenceError("sigma: sum of rho_H^q diverges for H >= (2q-1)/(2q) = " +
                          std::to_string(critical_hurst(q)));
  long double sum = 0.0L;
  for (std::int64_t t = kSigmaDirect; t >= 1; --t) sum += std::pow(static_cast<long double>(rho(H, t)), q);
  // Tail: rho^q = t^{-q(2-2H)} (sum_m b_m t^{-2m})^q = t^{-q(2-2H)} sum_j s_j t^{-2j}.
  constexpr int kTerms = 8;
  const std::vector<double> b = rho_series(H, kTerms);
  std::vector<double> s(static_cast<std::size_t>(kTerms), 0.0);
  s[0] = 1.0;
  for (int p = 0; p < q; ++p) {
    std::vector<double> next(static_cast<std::size_t>(kTerms), 0.0);
    for (int i = 0; i < kTerms; ++i)
      for (int j = 0; i + j < kTerms; ++j)
        next[static_cast<std::size_t>(i + j)] += s[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    s = std::move(next);
  }
  const double alpha = q * (2.0 - 2.0 * H);
  double tail = 0.0;
  for (int j = 0; j < kTerms; ++j) {
    if (s[static_cast<std::size_t>(j)] == 0.0) continue;
    tail += s[static_cast<std::size_t>(j)] * gsl_sf_hzeta(alpha + 2.0 * j, static_cast<double>(kSigmaDirect + 1));
  }
  const long double total = 1.0L + 2.0L * (sum + static_cast<long double>(tail));
  return std::sqrt(static_cast<double>(total) / factorial(q));
}

double sigma_quadratic(double H) { return 2.0 * sigma(H, 2); }

void validate(const BmInstance& inst) {
  check_hurst(inst.H);
  if (inst.q < 2) throw InvalidOrder("Breuer-Major: q must be >= 2, got " + std::to_string(inst.q));
  if (inst.n < 1) throw InvalidArgument("Breuer-Major: n must be >= 1, got " + std::to_string(inst.n));
  if (inst.H >= critical_hurst(inst.q))
    throw DivergenceError("Breuer-Major: H must be < (2q-1)/(2q) = " + std::to_string(critical_hurst(inst.q)));
}

namespace {

// rho_H(d) for |d| < 2n, stored with offset and raised to powers 0..q.
class RhoPowers {
 public:
  RhoPowers(double H, int n, int q) : n_(n), q_(q), table_(static_cast<std::size_t>((4 * n + 1) * (q + 1))) {
    for (int d = -2 * n; d <= 2 * n; ++d) {
      const double r = rho(H, d);
      double p = 1.0;
      for (int e = 0; e <= q; ++e) {
        table_[index(d, e)] = p;
        p *= r;
      }
    }
  }
  double operator()(int d, int e) const { return table_[index(d, e)]; }

 private:
  std::size_t index(int d, int e) const {
    return static_cast<std::size_t>((d + 2 * n_) * (q_ + 1) + e);
  }
  int n_;
  int q_;
  std::vector<double> table_;
};

// w_beta = C(a, beta)^2 a!^2 / (2a)!: share of the permutations pairing beta
// copies of u_k with u_j in <sym(u_k^a (x) u_l^a), u_i^a (x) u_j^a>.
std::vector<double> pairing_weights(int a) {
  std::vector<double> w(static_cast<std::size_t>(a) + 1);
  for (int beta = 0; beta <= a; ++beta) {
    const double c = binomial(a, beta);
    w[static_cast<std::size_t>(beta)] = c * c * factorial(a) * factorial(a) / factorial(2 * a);
  }
  return w;
}

struct ContractionSums {
  double symmetrized;
  double unsymmetrized;
};

ContractionSums naive_sums(const RhoPowers& R, int n, int r, int a) {
  const auto w = pairing_weights(a);
  long double sym = 0.0L;
  long double raw = 0.0L;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double outer = R(k - l, r) * R(i - j, r);
          double inner = 0.0;
          for (int beta = 0; beta <= a; ++beta)
            inner += w[static_cast<std::size_t>(beta)] * R(k - i, a - beta) * R(k - j, beta) * R(l - i, beta) *
                     R(l - j, a - beta);
          sym += outer * inner;
          raw += outer * R(k - i, a) * R(l - j, a);
        }
  return {static_cast<double>(sym), static_cast<double>(raw)};
}

ContractionSums difference_sums(const RhoPowers& R, int n, int r, int a) {
  const auto w = pairing_weights(a);
  long double sym = 0.0L;
  long double raw = 0.0L;
  // x = k - l, y = i - j, z = k - i; the remaining differences are
  // k - j = z + y, l - i = z - x, l - j = z - x + y.
  for (int x = -(n - 1); x <= n - 1; ++x) {
    for (int y = -(n - 1); y <= n - 1; ++y) {
      const double outer = R(x, r) * R(y, r);
      if (outer == 0.0) continue;
      long double acc_sym = 0.0L;
      long double acc_raw = 0.0L;
      for (int z = -(n - 1); z <= n - 1; ++z) {
        const int lo = std::max({0, x, z, z + y});
        const int hi = std::min({n, n + x, n + z, n + z + y});
        if (hi <= lo) continue;
        double inner = 0.0;
        for (int beta = 0; beta <= a; ++beta)
          inner += w[static_cast<std::size_t>(beta)] * R(z, a - beta) * R(z + y, beta) * R(z - x, beta) *
                   R(z - x + y, a - beta);
        acc_sym += static_cast<long double>(hi - lo) * inner;
        acc_raw += static_cast<long double>(hi - lo) * R(z, a) * R(z - x + y, a);
      }
      sym += outer * acc_sym;
      raw += outer * acc_raw;
    }
  }
  return {static_cast<double>(sym), static_cast<double>(raw)};
}

// q = 2, r = 1: both sums equal tr(R^4) = ||R^2||_F^2 for the Toeplitz matrix R.
// (R^2)_{i+d, i} = sum_{m=-i}^{n-1-i} rho(d - m) rho(m), read off a prefix sum per d.
double trace_r4(const RhoPowers& R, int n) {
  long double total = 0.0L;
  std::vector<long double> prefix(static_cast<std::size_t>(2 * n) + 1);
  for (int d = -(n - 1); d <= n - 1; ++d) {
    prefix[0] = 0.0L;
    for (int m = -n; m < n; ++m)
      prefix[static_cast<std::size_t>(m + n + 1)] =
          prefix[static_cast<std::size_t>(m + n)] + static_cast<long double>(R(d - m, 1)) * R(m, 1);
    const int i_lo = std::max(0, -d);
    const int i_hi = std::min(n, n - d);
    for (int i = i_lo; i < i_hi; ++i) {
      const long double entry = prefix[static_cast<std::size_t>(n - 1 - i + n + 1)] - prefix[static_cast<std::size_t>(-i + n)];
      total += entry * entry;
    }
  }
  return static_cast<double>(total);
}

}  // namespace

BoundReport bm_bound_exact(const BmInstance& inst, const BmOptions& options) {
  validate(inst);
  const int q = inst.q;
  const int n = inst.n;
  const double s = sigma(inst.H, q);
  const RhoPowers R(inst.H, n, q);

  BmPath path = options.path;
  if (path == BmPath::Auto) path = (q == 2 && n > kFastPathThreshold) ? BmPath::Fast : BmPath::DifferenceSum;
  if (path == BmPath::Fast && q != 2) throw InvalidArgument("bm_bound_exact: the fast path requires q = 2");
  const double dn = n;
  const double cost = path == BmPath::Naive ? dn * dn * dn * dn * q
                      : path == BmPath::DifferenceSum ? 8.0 * dn * dn * dn * q * (q - 1) / 2.0
                                                      : 2.0 * dn * dn;
  if (cost > options.operation_budget)
    throw ComplexityError("bm_bound_exact: about " + std::to_string(cost) + " operations exceed the budget of " +
                          std::to_string(options.operation_budget));

  BoundReport report;
  report.metric = Metric::Kolmogorov;
  long double pair_sum = 0.0L;
  for (int x = -(n - 1); x <= n - 1; ++x) pair_sum += static_cast<long double>(n - std::abs(x)) * R(x, q);
  const double variance = static_cast<double>(pair_sum) / (factorial(q) * s * s * dn);
  report.variance_term = (1.0 - variance) * (1.0 - variance);

  const double scale = 1.0 / (std::pow(factorial(q) * s, 4) * dn * dn);
  double unsym = report.variance_term;
  for (int r = 1; r < q; ++r) {
    const int a = q - r;
    ContractionSums sums{};
    if (path == BmPath::Fast) {
      const double t = trace_r4(R, n);
      sums = {t, t};
    } else if (path == BmPath::Naive) {
      sums = naive_sums(R, n, r, a);
    } else {
      sums = difference_sums(R, n, r, a);
    }
    const double b = binomial(q - 1, r - 1);
    const double w = static_cast<double>(q) * q * factorial(2 * q - 2 * r) * std::pow(factorial(r - 1), 2) *
                     b * b * b * b;
    report.contraction_terms.push_back({r, w * scale * sums.symmetrized});
    unsym += w * scale * sums.unsymmetrized;
  }
  report.unsymmetrized_squared_total = unsym;
  report.squared_total = report.variance_term;
  for (const auto& t : report.contraction_terms) report.squared_total += t.value;
  report.metric_constant = 1.0;
  report.bound = std::sqrt(report.squared_total);
  return report;
}

BmRate bm_rate(double H, int q) {
  check_hurst(H);
  if (q < 2) throw InvalidOrder("bm_rate: q must be >= 2");
  if (H >= critical_hurst(q)) throw DivergenceError("bm_rate: H must be < (2q-1)/(2q)");
  if (H <= 0.5) return {0.5, "n^(-1/2)"};
  if (H <= (2.0 * q - 3.0) / (2.0 * q - 2.0)) return {1.0 - H, "n^(H-1)"};
  return {q - q * H - 0.5, "n^(qH-q+1/2)"};
}

std::vector<BmRow> bm_table(double H, int q, const std::vector<int>& ns, const BmOptions& options) {
  std::vector<BmRow> rows;
  if (ns.empty()) return rows;
  const BmRate rate = bm_rate(H, q);
  for (int n : ns) {
    BoundReport report = bm_bound_exact({H, q, n}, options);
    rows.push_back({n, report.bound, std::pow(static_cast<double>(n), -rate.exponent), std::move(report)});
  }
  return rows;
}

SymKernel breuer_major_kernel(const BmInstance& inst) {
  validate(inst);
  const int n = inst.n;
  Eigen::MatrixXd G(n, n);
  const double scale = std::pow(static_cast<double>(n), -2.0 * inst.H);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) G(k, l) = scale * rho(inst.H, k - l);
  SymKernel f(GramSpace::make(G), inst.q);
  const double c = std::pow(static_cast<double>(n), inst.q * inst.H - 0.5) / (factorial(inst.q) * sigma(inst.H, inst.q));
  std::vector<int> m(static_cast<std::size_t>(inst.q));
  for (int k = 0; k < n; ++k) {
    std::fill(m.begin(), m.end(), k);
    f.set_coefficient(m, c);
  }
  return f;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need at least two points");
  double mx = 0.0;
  double my = 0.0;
  const auto m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("loglog_slope: values must be positive");
    mx += std::log(x[i]) / m;
    my += std::log(y[i]) / m;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace chaosbound
