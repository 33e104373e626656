// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "chaosbound/bounds.hpp"
#include "chaosbound/breuer_major.hpp"
#include "chaosbound/chaos.hpp"
#include "chaosbound/cli.hpp"
#include "chaosbound/io.hpp"
#include "chaosbound/pearson.hpp"
#include "chaosbound/simulate.hpp"
#include "chaosbound/tensor.hpp"
#include "chaosbound/wick.hpp"
#include "oracles.hpp"
#include "random_kernels.hpp"

using namespace chaosbound;
using namespace chaosbound::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the worst observed error against a tolerance.
struct Worst {
  double value = 0.0;
  void add(double e) { value = std::max(value, std::isnan(e) ? INFINITY : e); }
};

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

Outcome oracle_equality() {
  std::mt19937_64 rng(101);
  Worst w;
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 1 + trial % 3;
    const int q = 2 + (trial / 3) % 2;
    const auto space = random_space(dim, rng);
    const auto f = random_kernel(space, q, rng, 0.5);
    const double got = gauss_bound_single(f, Metric::Kolmogorov).squared_total;
    w.add(rel_err(got, oracle_gauss(ChaosVector::single(f), q)));
  }
  return {w.value <= 1e-10, fmt::format("max rel err {:.3g}", w.value)};
}

Outcome moment_identities() {
  std::mt19937_64 rng(202);
  Worst w;
  for (int trial = 0; trial < 50; ++trial) {
    const auto space = random_space(1 + trial % 3, rng);
    const auto f = random_kernel(space, 2, rng, 0.5);
    const auto F = ChaosVector::single(f);
    const double m2 = exact_moment(F, 2);
    const double m3 = exact_moment(F, 3);
    const double m4 = exact_moment(F, 4);
    const double nu = 0.5 + 0.1 * trial;
    w.add(rel_err(second_chaos_gauss_interior(m2, m4), oracle_gauss(F, 2)));
    w.add(rel_err(second_chaos_gamma_interior(nu, m2, m3, m4), oracle_gamma(F, 2, nu)));
    const Polynomial P = to_polynomial(F);
    const Polynomial DF2 = derivative_norm_sq(P, *space);
    w.add(rel_err(gaussian_expectation(DF2 * DF2, *space), 2.0 / 3.0 * m4 + 2.0 * m2 * m2));
    Polynomial power(P.dim(), 1.0);
    for (int s = 0; s <= 3; ++s) {
      w.add(rel_err(gaussian_expectation(power * DF2, *space), 2.0 / (s + 1.0) * exact_moment(F, s + 2)));
      power = power * P;
    }
  }
  return {w.value <= 1e-8, fmt::format("max rel err {:.3g}", w.value)};
}

Outcome gamma_moments() {
  Worst w;
  for (double nu : {1.0, 2.0, 3.0}) {
    const auto p = density_from_tau(TauModel(PearsonSpec::centered_gamma(nu)));
    const std::array<double, 4> expected{0.0, 2 * nu, 8 * nu, 48 * nu + 12 * nu * nu};
    for (int k = 1; k <= 4; ++k) w.add(std::abs(p.moment(k) - expected[static_cast<std::size_t>(k - 1)]));
  }
  return {w.value <= 1e-6, fmt::format("max abs err {:.3g}", w.value)};
}

Outcome chi_square_detection() {
  const auto space = GramSpace::identity(1);
  const std::array<double, 1> e{1.0};
  const double single = gamma_bound_single(tensor_power(space, e, 2), 1.0, Metric::H2).bound;
  const double moments = second_chaos_gamma_bound(1.0, 2.0, 8.0, 60.0);
  const bool pass = std::abs(single) <= 1e-12 && std::abs(moments) <= 1e-12;
  return {pass, fmt::format("single {:.3g}, moments {:.3g}", single, moments)};
}

Outcome breuer_major_closed_form() {
  Worst closed;
  for (int n = 2; n <= 64; n += 2) closed.add(std::abs(bm_bound_exact({0.5, 2, n}).bound - std::sqrt(2.0 / n)));
  Worst tensor;
  for (double H : {0.3, 0.6, 0.7}) {
    for (int n : {1, 2, 5, 8, 16, 32}) {
      const BmInstance inst{H, 2, n};
      const double oracle = gauss_bound_single(breuer_major_kernel(inst), Metric::Kolmogorov).squared_total;
      tensor.add(rel_err(bm_bound_exact(inst).squared_total, oracle));
    }
  }
  return {closed.value <= 1e-12 && tensor.value <= 1e-10,
          fmt::format("closed form {:.3g}, tensor oracle {:.3g}", closed.value, tensor.value)};
}

Outcome rate_regimes() {
  std::vector<int> ns;
  for (int k = 4; k <= 12; ++k) ns.push_back(1 << k);
  struct Case {
    double H, target, window;
  };
  bool pass = true;
  std::string detail;
  for (const Case& c : {Case{0.3, -0.5, 0.10}, Case{0.5, -0.5, 0.10}, Case{0.7, -0.1, 0.15}}) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& row : bm_table(c.H, 2, ns, {BmPath::Fast})) {
      xs.push_back(row.n);
      ys.push_back(row.exact_bound);
    }
    const double slope = loglog_slope(xs, ys);
    pass &= std::abs(slope - c.target) <= c.window;
    detail += fmt::format("{}H={} slope {:.4f}", detail.empty() ? "" : ", ", c.H, slope);
  }
  return {pass, detail};
}

Outcome bound_domination() {
  constexpr int kDraws = 100000;
  bool pass = true;
  double margin = INFINITY;
  std::uint64_t seed = 7000;
  for (double H : {0.3, 0.5, 0.6}) {
    for (int n : {16, 64, 256}) {
      const auto z = sample_Zn(H, 2, n, kDraws, seed++);
      const double d = empirical_kolmogorov(z.values, standard_normal_cdf);
      const double limit = bm_bound_exact({H, 2, n}).bound + 3.0 * dkw_allowance(kDraws);
      pass &= d <= limit;
      margin = std::min(margin, limit - d);
    }
  }
  return {pass, fmt::format("smallest margin {:.4g}", margin)};
}

Outcome stein_bounds() {
  const TauModel gauss(PearsonSpec::gaussian());
  double sup_u = 0.0;
  double sup_du = 0.0;
  for (double z : {-1.0, 0.0, 1.0}) {
    const auto sol = stein_solve(gauss, {[z](double x) { return x <= z ? 1.0 : 0.0; }, {z}});
    for (int i = 0; i < 4001; ++i) {
      const double x = -10.0 + 20.0 * (i + 0.5) / 4001;
      sup_u = std::max(sup_u, std::abs(sol.value(x)));
      sup_du = std::max(sup_du, std::abs(sol.derivative(x)));
    }
  }
  bool pass = sup_u <= std::sqrt(2 * std::numbers::pi) / 4 + 1e-6 && sup_du <= 1 + 1e-6;

  const std::vector<TestFunction> tests{
      {[](double x) { return x <= 0.0 ? 1.0 : 0.0; }, {0.0}},
      {[](double x) { return std::tanh(x); }, {}},
      {[](double x) { return std::sin(x); }, {}},
      {[](double x) { return std::cos(2 * x); }, {}},
      {[](double x) { return x > 0.3 ? 0.5 : -0.5; }, {0.3}},
  };
  double worst_ratio = 0.0;
  for (const auto& spec : {PearsonSpec::gaussian(), PearsonSpec::centered_gamma(1.0), PearsonSpec::uniform()}) {
    for (const auto& h : tests) {
      const auto check = stein_bound_check(stein_solve(TauModel(spec), h));
      pass &= check.pass6;
      worst_ratio = std::max(worst_ratio, check.sup_sum / check.sup_h);
    }
  }
  return {pass, fmt::format("sup|U| {:.6f}, sup|U'| {:.6f}, worst sup/sup|h| {:.4f}", sup_u, sup_du, worst_ratio)};
}

Outcome chatterjee() {
  const auto g = [](const Eigen::VectorXd& v) { return (v[0] * v[0] - 1.0) / std::numbers::sqrt2; };
  const Gradient grad = [](const Eigen::VectorXd& v) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(v.size());
    d[0] = std::numbers::sqrt2 * v[0];
    return d;
  };
  const auto check = chatterjee_identity(g, grad, [](double y) { return std::cos(y); },
                                         [](double y) { return -std::sin(y); }, 2, 100000, 9001);
  bool pass = check.z_score() < 3.0;

  const auto space = GramSpace::identity(2);
  const std::array<double, 2> e{1.0, 0.0};
  const auto F = ChaosVector::single(tensor_power(space, e, 2) * (1.0 / std::numbers::sqrt2));
  const ChaosVector inner = malliavin_inner(F);
  std::mt19937_64 rng(9002);
  std::normal_distribution<double> normal;
  double worst_z = 0.0;
  for (int point = 0; point < 10; ++point) {
    Eigen::VectorXd v(2);
    v << normal(rng), normal(rng);
    const auto s = chatterjee_weight(grad, v, 8, 20000, 9100 + point);
    const std::array<double, 2> x{v[0], v[1]};
    const double exact = eval_chaos(inner, x);
    worst_z = std::max(worst_z, std::abs(s.value - exact) / std::max(s.std_error, 1e-300));
  }
  pass &= worst_z < 4.0;
  return {pass, fmt::format("identity z {:.3f}, worst pathwise z {:.3f}", check.z_score(), worst_z)};
}

Outcome chi2_example() {
  const auto dir = std::filesystem::temp_directory_path() / "chaosbound_acceptance_chi2";
  std::filesystem::remove_all(dir);
  const auto config = parse_config(Json::parse(R"({"command": "chi2-example", "ns": [16, 32, 64, 128, 256, 512]})"));
  std::ostringstream log;
  run(config, {dir, std::nullopt, 1}, log);
  const Json manifest = read_json_file(dir / "manifest.json");
  std::filesystem::remove_all(dir);
  const double slope = manifest["summary"]["slope"].get<double>();
  return {std::abs(slope + 0.5) <= 0.1, fmt::format("slope {:.4f}", slope)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"oracle equality of the Gaussian bound", 10, oracle_equality},
      {"second chaos moment identities", 10, moment_identities},
      {"centered gamma moments from tau", INFINITY, gamma_moments},
      {"exact chi-square detection", INFINITY, chi_square_detection},
      {"Breuer-Major closed form and tensor oracle", INFINITY, breuer_major_closed_form},
      {"Breuer-Major rate regimes", 300, rate_regimes},
      {"Kolmogorov distance dominated by the bound", 300, bound_domination},
      {"Stein solution bounds", INFINITY, stein_bounds},
      {"Chatterjee identity and pathwise weight", INFINITY, chatterjee},
      {"chi-square example rate", 120, chi2_example},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt::format(", over the {:.0f} s budget", c.budget_s);
    }
    failures += o.pass ? 0 : 1;
    fmt::print("{} {:2d} {}: {} ({:.2f} s)\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, o.detail, secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
