#include "chaosbound/pearson.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "chaosbound/error.hpp"

namespace chaosbound {

namespace {

bool inside(double x, double a, double b) { return x > a && x < b; }

std::string fmt_endpoint(double x) { return std::isinf(x) ? (x < 0 ? "-inf" : "inf") : std::to_string(x); }

// Real roots of alpha y^2 + beta y + gamma, snapped onto finite support endpoints
// so that tau and Phi can be evaluated from the exact difference x - endpoint.
std::vector<double> quadratic_roots(const PearsonSpec& s) {
  std::vector<double> roots;
  if (s.alpha == 0.0) {
    if (s.beta != 0.0) roots.push_back(-s.gamma / s.beta);
  } else {
    const double disc = s.beta * s.beta - 4.0 * s.alpha * s.gamma;
    if (disc > 0.0) {
      const double q = -0.5 * (s.beta + std::copysign(std::sqrt(disc), s.beta));
      roots.push_back(q / s.alpha);
      roots.push_back(s.gamma / q);
    }
  }
  for (double& r : roots)
    for (double e : {s.a, s.b})
      if (!std::isinf(e) && std::abs(r - e) <= 1e-12 * std::max(1.0, std::abs(e))) r = e;
  return roots;
}

// x - r, read off the exact node offsets when r is a support endpoint.
double offset(const PearsonSpec& s, const Node& n, double r) {
  if (r == s.a) return n.from_a;
  if (r == s.b) return -n.from_b;
  return n.x - r;
}

Node node_at(const PearsonSpec& s, double x) { return {x, x - s.a, s.b - x}; }

double quadratic_value(const PearsonSpec& s, const Node& n) {
  const auto roots = quadratic_roots(s);
  if (roots.size() == 1) return s.beta * offset(s, n, roots[0]);
  if (roots.size() == 2) return s.alpha * offset(s, n, roots[0]) * offset(s, n, roots[1]);
  return (s.alpha * n.x + s.beta) * n.x + s.gamma;
}

// Phi(x) = int_0^x y / tau(y) dy for tau(y) = alpha y^2 + beta y + gamma, gamma > 0.
double quadratic_exponent(const PearsonSpec& s, const Node& n) {
  const double x = n.x;
  const double al = s.alpha;
  const double be = s.beta;
  const double ga = s.gamma;
  if (al == 0.0 && be == 0.0) return x * x / (2.0 * ga);
  const auto roots = quadratic_roots(s);
  if (al == 0.0) return x / be - ga / (be * be) * std::log(offset(s, n, roots[0]) / -roots[0]);
  const double log_ratio = std::log(quadratic_value(s, n) / ga);
  const double disc = be * be - 4.0 * al * ga;
  double J = 0.0;  // int_0^x dy / tau(y)
  if (roots.size() == 2) {
    const double r1 = roots[0];
    const double r2 = roots[1];
    J = std::log(std::abs(offset(s, n, r1) * r2 / (offset(s, n, r2) * r1))) / (al * (r1 - r2));
  } else if (disc < 0.0) {
    const double w = std::sqrt(-disc);
    J = 2.0 / w * (std::atan((2.0 * al * x + be) / w) - std::atan(be / w));
  } else {
    const double root = -be / (2.0 * al);
    J = (1.0 / (-root) - 1.0 / (x - root)) / al;
  }
  return log_ratio / (2.0 * al) - be / (2.0 * al) * J;
}

// Divergence of Phi toward every endpoint: Phi must keep growing as the endpoint
// is approached (a bounded Phi leaves the Stein solution non-unique).
void check_explosion(const TauModel& m) {
  auto probe = [&](double endpoint, double sign) {
    double near_pt = 0.0;
    double far_pt = 0.0;
    if (std::isinf(endpoint)) {
      near_pt = sign * 1e2;
      far_pt = sign * 1e4;
    } else {
      near_pt = endpoint - sign * 1e-2 * std::abs(endpoint);
      far_pt = endpoint - sign * 1e-8 * std::abs(endpoint);
    }
    const double grow = m.exponent(far_pt) - m.exponent(near_pt);
    if (!(grow > 1.0))
      throw InvalidArgument("tau does not make the exponent integral diverge at " + fmt_endpoint(endpoint) +
                            "; the Stein solution is not unique");
  };
  probe(m.b(), 1.0);
  probe(m.a(), -1.0);
}

}  // namespace

double PearsonSpec::tau(double x) const {
  if (!inside(x, a, b)) return 0.0;
  return quadratic_value(*this, node_at(*this, x));
}

void PearsonSpec::validate() const {
  if (!(a < 0.0 && 0.0 < b)) throw InvalidArgument("PearsonSpec: support must satisfy a < 0 < b");
  if (!(gamma > 0.0)) throw InvalidArgument("PearsonSpec: tau(0) = gamma must be > 0");
  auto raw = [&](double x) { return (alpha * x + beta) * x + gamma; };
  for (double e : {a, b}) {
    if (std::isinf(e)) continue;
    const double scale = std::abs(alpha) * e * e + std::abs(beta * e) + std::abs(gamma);
    if (std::abs(raw(e)) > 1e-12 * scale)
      throw InvalidArgument("PearsonSpec: tau must vanish at the finite endpoint " + std::to_string(e));
  }
  // roots strictly inside the support make tau change sign there
  std::vector<double> roots;
  if (alpha == 0.0) {
    if (beta != 0.0) roots.push_back(-gamma / beta);
  } else {
    const double disc = beta * beta - 4.0 * alpha * gamma;
    if (disc >= 0.0) {
      const double w = std::sqrt(disc);
      roots.push_back((-beta - w) / (2.0 * alpha));
      roots.push_back((-beta + w) / (2.0 * alpha));
    }
  }
  for (double r : roots) {
    const double tol = 1e-12 * std::max(1.0, std::abs(r));
    if (r > a + tol && r < b - tol)
      throw InvalidArgument("PearsonSpec: tau vanishes at " + std::to_string(r) + " inside the support");
  }
}

PearsonSpec PearsonSpec::gaussian() { return {0.0, 0.0, 1.0, -kInf, kInf}; }

PearsonSpec PearsonSpec::centered_gamma(double nu) {
  if (!(nu > 0.0)) throw InvalidArgument("centered_gamma: nu must be > 0");
  return {0.0, 2.0, 2.0 * nu, -nu, kInf};
}

PearsonSpec PearsonSpec::uniform() { return {-0.5, 0.0, 0.5, -1.0, 1.0}; }

TauModel::TauModel(const PearsonSpec& spec) : a_(spec.a), b_(spec.b), spec_(spec) {
  spec.validate();
  tau_ = [spec](double x) { return spec.tau(x); };
}

TauModel::TauModel(RealFunction tau, double a, double b) : tau_(std::move(tau)), a_(a), b_(b) {
  if (!(a < 0.0 && 0.0 < b)) throw InvalidArgument("TauModel: support must satisfy a < 0 < b");
  if (!(tau_(0.0) > 0.0)) throw InvalidArgument("TauModel: tau(0) must be > 0");
  check_explosion(*this);
}

double TauModel::tau(double x) const { return inside(x, a_, b_) ? tau_(x) : 0.0; }

double TauModel::exponent(double x) const {
  if (!inside(x, a_, b_)) return kInf;
  if (spec_) return quadratic_exponent(*spec_, node_at(*spec_, x));
  if (x == 0.0) return 0.0;
  return integrate([this](double y) { return y / tau_(y); }, 0.0, x);
}

double TauModel::log_weight(const Node& n) const {
  if (!inside(n.x, a_, b_) && !(n.from_a > 0.0 && n.from_b > 0.0)) return -kInf;
  if (!spec_) {
    const double t = tau_(n.x);
    return t > 0.0 ? -exponent(n.x) - std::log(t) : -kInf;
  }
  const double t = quadratic_value(*spec_, n);
  return t > 0.0 ? -quadratic_exponent(*spec_, n) - std::log(t) : -kInf;
}

double DensityModel::moment(int k) const {
  const std::array<double, 1> cut{0.0};
  if (pdf_node) {
    return integrate_nodes(
        [&](const Node& n) {
          const double px = pdf_node(n);
          return px == 0.0 ? 0.0 : std::pow(n.x, k) * px;
        },
        a, b, cut);
  }
  return integrate(
      [&](double x) {
        const double px = (*this)(x);
        return px == 0.0 ? 0.0 : std::pow(x, k) * px;
      },
      a, b, cut);
}

DensityModel DensityModel::standard_normal() {
  const double c = std::sqrt(2.0 * std::numbers::pi);
  return {-kInf, kInf, [c](double x) { return std::exp(-0.5 * x * x) / c; }, c};
}

DensityModel DensityModel::centered_gamma(double nu) {
  if (!(nu > 0.0)) throw InvalidArgument("centered_gamma: nu must be > 0");
  const double k = nu / 2.0;
  const double log_c = k * std::log(2.0) + std::lgamma(k);
  return {-nu, kInf,
          [nu, k, log_c](double x) {
            const double y = x + nu;
            if (!(y > 0.0)) return 0.0;
            return std::exp((k - 1.0) * std::log(y) - y / 2.0 - log_c);
          },
          std::exp(log_c)};
}

DensityModel DensityModel::uniform(double half_width) {
  if (!(half_width > 0.0)) throw InvalidArgument("uniform: half width must be > 0");
  return {-half_width, half_width, [half_width](double) { return 0.5 / half_width; }, 2.0 * half_width};
}

RealFunction tau_from_density(const DensityModel& p) {
  if (!(p.a < 0.0 && 0.0 < p.b)) throw InvalidArgument("tau_from_density: support must contain 0 in its interior");
  const double lo = std::isinf(p.a) ? -6.0 : p.a;
  const double hi = std::isinf(p.b) ? 6.0 : p.b;
  for (int i = 1; i < 100; ++i) {
    const double x = lo + (hi - lo) * i / 100.0;
    if (!(p(x) > 0.0)) throw InvalidArgument("tau_from_density: density vanishes at " + std::to_string(x) + " inside the support");
  }
  const std::array<double, 1> cut{0.0};
  const double mass = integrate([&](double x) { return p(x); }, p.a, p.b, cut);
  const double mean = integrate([&](double x) { return x * p(x); }, p.a, p.b, cut);
  if (std::abs(mass - 1.0) > 1e-8) throw InvalidArgument("tau_from_density: density has mass " + std::to_string(mass));
  if (std::abs(mean) > 1e-8) throw InvalidArgument("tau_from_density: density is not centered, mean " + std::to_string(mean));
  return [p](double x) {
    if (!inside(x, p.a, p.b)) return 0.0;
    const double px = p(x);
    if (!(px > 0.0)) return 0.0;
    auto first_moment = [&p](double y) { return y * p(y); };
    const std::array<double, 1> zero{0.0};
    // The upper tail avoids a finite left endpoint, where densities may be
    // singular; an infinite left tail is integrated directly to avoid cancellation.
    if (x >= 0.0 || !std::isinf(p.a)) return integrate(first_moment, x, p.b, zero) / px;
    return -integrate(first_moment, p.a, x) / px;
  };
}

DensityModel density_from_tau(const TauModel& model) {
  const std::array<double, 1> cut{0.0};
  const double c =
      integrate_nodes([&model](const Node& n) { return std::exp(model.log_weight(n)); }, model.a(), model.b(), cut);
  if (!(c > 0.0) || !std::isfinite(c)) throw AccuracyError("density_from_tau: normalization failed");
  const double log_c = std::log(c);
  DensityModel d;
  d.a = model.a();
  d.b = model.b();
  d.normalization = c;
  d.pdf = [model, log_c](double x) { return std::exp(model.log_weight({x, x - model.a(), model.b() - x}) - log_c); };
  d.pdf_node = [model, log_c](const Node& n) { return std::exp(model.log_weight(n) - log_c); };
  return d;
}

SteinSolution::SteinSolution(TauModel model, TestFunction h) : model_(std::move(model)), h_(std::move(h)) {
  if (!h_.h) throw InvalidArgument("stein_solve: empty test function");
  const DensityModel p = density_from_tau(model_);
  std::vector<double> cuts = h_.breakpoints;
  cuts.push_back(0.0);
  eh_ = integrate_nodes([&](const Node& n) { return h_.h(n.x) * p.pdf_node(n); }, p.a, p.b, cuts);
}

double SteinSolution::value(double x) const {
  const double a = model_.a();
  const double b = model_.b();
  if (!inside(x, a, b)) return (h_.h(x) - eh_) / x;
  const double phi_x = model_.exponent(x);
  auto term = [&](const Node& n) {
    const double w = model_.log_weight(n);
    return w == -kInf ? 0.0 : (h_.h(n.x) - eh_) * std::exp(phi_x + w);
  };
  // Node offsets refer to the integration limits; only the support endpoint
  // among them is passed through.
  if (x < 0.0)
    return integrate_nodes([&](const Node& n) { return term({n.x, n.from_a, b - n.x}); }, a, x, h_.breakpoints);
  return -integrate_nodes([&](const Node& n) { return term({n.x, n.x - a, n.from_b}); }, x, b, h_.breakpoints);
}

double SteinSolution::tau_derivative(double x) const {
  if (!inside(x, model_.a(), model_.b())) return 0.0;
  return x * value(x) + h_.h(x) - eh_;
}

double SteinSolution::derivative(double x) const {
  if (inside(x, model_.a(), model_.b())) return tau_derivative(x) / model_.tau(x);
  const double step = 1e-6 * std::max(1.0, std::abs(x));
  return (value(x + step) - value(x - step)) / (2.0 * step);
}

std::vector<SteinSolution::Row> SteinSolution::tabulate(const std::vector<double>& grid) const {
  std::vector<Row> rows;
  rows.reserve(grid.size());
  for (double x : grid) {
    const double u = value(x);
    const bool in = inside(x, model_.a(), model_.b());
    const double du = in ? (x * u + h_.h(x) - eh_) / model_.tau(x) : derivative(x);
    rows.push_back({x, u, du});
  }
  return rows;
}

SteinSolution stein_solve(const TauModel& model, const TestFunction& h) { return SteinSolution(model, h); }

std::vector<double> stein_grid(const TauModel& model, int points) {
  if (points < 2) throw InvalidArgument("stein_grid: need at least two points");
  const double a = model.a();
  const double b = model.b();
  const double lo = std::isinf(a) ? -10.0 : a;
  const double hi = std::isinf(b) ? (std::isinf(a) ? 10.0 : 30.0) : b;
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) grid.push_back(lo + (hi - lo) * (i + 0.5) / points);
  for (int i = 0; i <= 20; ++i) {
    if (!std::isinf(a)) grid.push_back(a - 2.0 * i / 20.0);
    if (!std::isinf(b)) grid.push_back(b + 2.0 * i / 20.0);
  }
  std::sort(grid.begin(), grid.end());
  return grid;
}

SteinBoundCheck stein_bound_check(const SteinSolution& sol, const std::vector<double>& grid) {
  const TauModel& m = sol.model();
  const auto& h = sol.test_function().h;
  SteinBoundCheck out;
  double sup_h_inside = 0.0;
  double sup_h_all = 0.0;
  double sup_sum_inside = 0.0;
  double sup_sum_all = 0.0;
  for (double x : grid) {
    const double u = sol.value(x);
    const double xu = std::abs(x * u);
    const double tu = std::abs(inside(x, m.a(), m.b()) ? x * u + h(x) - sol.expectation() : 0.0);
    const double hx = std::abs(h(x));
    sup_h_all = std::max(sup_h_all, hx);
    sup_sum_all = std::max(sup_sum_all, xu + tu);
    if (inside(x, m.a(), m.b())) {
      out.sup_xU = std::max(out.sup_xU, xu);
      out.sup_tauU = std::max(out.sup_tauU, tu);
      sup_h_inside = std::max(sup_h_inside, hx);
      sup_sum_inside = std::max(sup_sum_inside, xu + tu);
    }
  }
  auto inv = [](double e) { return std::isinf(e) ? 0.0 : 1.0 / std::abs(e); };
  out.K = 2.0 * std::max({3.0, inv(m.a()), inv(m.b())});
  out.sup_sum = sup_sum_all;
  out.sup_h = sup_h_all;
  const double slack = 1e-9;
  out.pass6 = sup_sum_inside <= 6.0 * sup_h_inside + slack;
  out.passK = sup_sum_all <= out.K * sup_h_all + slack;
  return out;
}

SteinBoundCheck stein_bound_check(const SteinSolution& sol) { return stein_bound_check(sol, stein_grid(sol.model())); }

PearsonCoefficients pearson_classify(const PearsonSpec& spec) {
  return {-spec.beta, -(2.0 * spec.alpha + 1.0), spec.gamma, spec.beta, spec.alpha, spec.beta,
          2.0 * spec.alpha + 1.0};
}

double char_residual(const TauModel& model, const RealFunction& f, const RealFunction& df) {
  const DensityModel p = density_from_tau(model);
  const std::array<double, 1> cut{0.0};
  try {
    QuadratureOptions loose;
    loose.acceptance = 1e-3;
    integrate([&](double x) { return std::abs(model.tau(x) * df(x)) * p(x); }, p.a, p.b, cut, loose);
  } catch (const AccuracyError& e) {
    throw InvalidArgument(std::string("char_residual: tau f' is not integrable: ") + e.what());
  }
  return integrate([&](double x) { return (model.tau(x) * df(x) - x * f(x)) * p(x); }, p.a, p.b, cut);
}

}  // namespace chaosbound
