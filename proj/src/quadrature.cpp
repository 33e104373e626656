#include "chaosbound/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "chaosbound/error.hpp"

namespace chaosbound {

namespace {

using Plain = std::function<double(double)>;

double kronrod(const Plain& f, double lo, double hi, double tol, double& error, double& l1) {
  namespace bq = boost::math::quadrature;
  double e = 0.0;
  double n = 0.0;
  const double v = bq::gauss_kronrod<double, 61>::integrate(f, lo, hi, 12, tol, &e, &n);
  error += e;
  l1 += n;
  return v;
}

// Half-infinite ranges are walked in chunks whose length doubles every 16
// steps, stopping once several consecutive chunks are negligible.
double chunked(const Plain& f, double lo, double hi, double tol, double& error, double& l1) {
  if (!std::isinf(lo) && !std::isinf(hi)) return kronrod(f, lo, hi, tol, error, l1);
  if (std::isinf(lo) && std::isinf(hi)) return chunked(f, lo, 0.0, tol, error, l1) + chunked(f, 0.0, hi, tol, error, l1);
  const double dir = std::isinf(hi) ? 1.0 : -1.0;
  double start = std::isinf(hi) ? lo : hi;
  double length = std::max(1.0, 0.125 * std::abs(start));
  double total = 0.0;
  int quiet = 0;
  for (int k = 0; k < 4096 && quiet < 3; ++k) {
    if (k > 0 && k % 16 == 0) length *= 2.0;
    const double end = start + dir * length;
    double chunk_l1 = 0.0;
    total += kronrod(f, std::min(start, end), std::max(start, end), tol, error, chunk_l1);
    l1 += chunk_l1;
    quiet = chunk_l1 <= tol * l1 ? quiet + 1 : 0;
    start = end;
    if (!std::isfinite(start)) break;
  }
  if (quiet < 3) error = std::numeric_limits<double>::infinity();
  return total;
}

double checked(const NodeFunction& f, const Node& node) {
  const double v = f(node);
  if (!std::isfinite(v)) throw AccuracyError("integrate: non-finite integrand value at x = " + std::to_string(node.x));
  return v;
}

// One piece [lo, hi] of the range [a, b].
double piece(const NodeFunction& f, double a, double b, double lo, double hi, const QuadratureOptions& options) {
  namespace bq = boost::math::quadrature;
  thread_local bq::tanh_sinh<double> finite;
  thread_local bq::exp_sinh<double> half;
  thread_local bq::sinh_sinh<double> whole;
  const Plain plain = [&](double x) { return checked(f, {x, x - a, b - x}); };
  double error = 0.0;
  double l1 = 0.0;
  double value = 0.0;
  const bool lo_inf = std::isinf(lo);
  const bool hi_inf = std::isinf(hi);
  try {
    if (lo_inf && hi_inf) {
      value = whole.integrate(plain, options.tolerance, &error, &l1);
    } else if (lo_inf || hi_inf) {
      value = half.integrate(plain, lo, hi, options.tolerance, &error, &l1);
    } else {
      // Mapped onto s in [0, 1], where the rule's error estimate does not
      // depend on the width. The complement sc gives the exact distance to the
      // nearer end: -s on the left half and 1 - s on the right half.
      const double width = hi - lo;
      auto located = [&](double s, double sc) {
        const double x = sc < 0.0 ? lo - width * sc : hi - width * sc;
        Node node{x, x - a, b - x};
        if (sc < 0.0 && lo == a) node.from_a = -width * sc;
        if (sc > 0.0 && hi == b) node.from_b = width * sc;
        (void)s;
        return width * checked(f, node);
      };
      value = finite.integrate(located, 0.0, 1.0, options.tolerance, &error, &l1);
    }
  } catch (const std::exception&) {
    error = std::numeric_limits<double>::infinity();
  }
  const auto acceptable = [&](double v, double err, double norm) {
    return std::isfinite(v) && err <= options.acceptance * norm + 1e-14;
  };
  if (acceptable(value, error, l1)) return value;
  // Double-exponential rules converge slowly across kinks and oscillating
  // tails; adaptive Gauss-Kronrod on bounded chunks handles those.
  double gk_error = 0.0;
  double gk_l1 = 0.0;
  double gk_value = std::numeric_limits<double>::quiet_NaN();
  try {
    gk_value = chunked(plain, lo, hi, options.tolerance, gk_error, gk_l1);
  } catch (const std::exception&) {
    gk_error = std::numeric_limits<double>::infinity();
  }
  if (acceptable(gk_value, gk_error, gk_l1)) return gk_value;
  throw AccuracyError("integrate: error estimates " + std::to_string(error) + " (double-exponential) and " +
                      std::to_string(gk_error) + " (Gauss-Kronrod) with L1 norm " + std::to_string(l1) + " on [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace

double integrate_nodes(const NodeFunction& f, double a, double b, std::span<const double> breakpoints,
                       const QuadratureOptions& options) {
  if (std::isnan(a) || std::isnan(b)) throw InvalidArgument("integrate: NaN limit");
  if (a == b) return 0.0;
  if (a > b) {
    return -integrate_nodes([&](const Node& n) { return f({n.x, n.from_b, n.from_a}); }, b, a, breakpoints, options);
  }
  std::vector<double> cuts{a};
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin() + 1, cuts.end() - 1);
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += piece(f, a, b, cuts[i], cuts[i + 1], options);
  return total;
}

double integrate(const RealFunction& f, double a, double b, std::span<const double> breakpoints,
                 const QuadratureOptions& options) {
  return integrate_nodes([&](const Node& n) { return f(n.x); }, a, b, breakpoints, options);
}

}  // namespace chaosbound
