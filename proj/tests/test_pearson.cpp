#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "chaosbound/error.hpp"
#include "chaosbound/pearson.hpp"

using namespace chaosbound;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

TestFunction indicator(double z) {
  return {[z](double x) { return x <= z ? 1.0 : 0.0; }, {z}};
}

std::vector<double> interior_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * (i + 0.5) / n);
  return g;
}

}  // namespace

TEST_CASE("quadrature") {
  CHECK(integrate([](double x) { return std::exp(-x * x / 2); }, -kInf, kInf) ==
        doctest::Approx(std::sqrt(2 * std::numbers::pi)).epsilon(1e-13));
  CHECK(integrate([](double x) { return 1 / std::sqrt(x); }, 0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(integrate([](double x) { return std::exp(-x); }, 1.0, kInf) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
  const std::vector<double> cut{0.3};
  CHECK(integrate([](double x) { return x < 0.3 ? 1.0 : 0.0; }, 0.0, 1.0, cut) == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(integrate([](double x) { return x; }, 1.0, 0.0) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(integrate([](double) { return std::nan(""); }, 0.0, 1.0), AccuracyError);
}

TEST_CASE("PearsonSpec validation") {
  CHECK_NOTHROW(PearsonSpec::gaussian().validate());
  CHECK_NOTHROW(PearsonSpec::centered_gamma(1.0).validate());
  CHECK_NOTHROW(PearsonSpec::uniform().validate());
  CHECK_THROWS_AS((PearsonSpec{0.0, 2.0, 2.0, -kInf, kInf}.validate()), InvalidArgument);  // root at -1 inside
  CHECK_THROWS_AS((PearsonSpec{-0.5, 0.0, 0.5, -2.0, 1.0}.validate()), InvalidArgument);   // tau(-2) != 0
  CHECK_THROWS_AS((PearsonSpec{0.0, 0.0, 1.0, 1.0, kInf}.validate()), InvalidArgument);    // 0 outside support
}

TEST_CASE("tau_from_density") {
  SUBCASE("standard normal") {
    const auto tau = tau_from_density(DensityModel::standard_normal());
    double err = 0.0;
    for (double x : interior_grid(-6, 6, 121)) err = std::max(err, std::abs(tau(x) - 1.0));
    CHECK(err < 1e-8);
  }
  SUBCASE("centered gamma") {
    for (double nu : {1.0, 2.0, 3.5}) {
      const auto tau = tau_from_density(DensityModel::centered_gamma(nu));
      double err = 0.0;
      for (double x : interior_grid(-nu, 20, 97)) err = std::max(err, std::abs(tau(x) - 2 * (x + nu)));
      CHECK(err < 1e-8);
      CHECK(tau(-nu - 1) == 0.0);
    }
  }
  SUBCASE("uniform") {
    const auto tau = tau_from_density(DensityModel::uniform());
    double err = 0.0;
    for (double x : interior_grid(-1, 1, 99)) err = std::max(err, std::abs(tau(x) - (1 - x * x) / 2));
    CHECK(err < 1e-8);
  }
  SUBCASE("errors") {
    DensityModel shifted = DensityModel::uniform();
    shifted.a = -0.5;
    shifted.b = 1.5;
    CHECK_THROWS_AS(tau_from_density(shifted), InvalidArgument);
    DensityModel holed{-1.0, 1.0, [](double x) { return std::abs(x) < 0.5 ? 0.0 : 1.0; }, 1.0};
    CHECK_THROWS_AS(tau_from_density(holed), InvalidArgument);
  }
}

TEST_CASE("density_from_tau") {
  SUBCASE("gaussian") {
    const auto p = density_from_tau(TauModel(PearsonSpec::gaussian()));
    CHECK(p.normalization == doctest::Approx(std::sqrt(2 * std::numbers::pi)).epsilon(1e-12));
    double err = 0.0;
    for (double x : interior_grid(-8, 8, 161))
      err = std::max(err, std::abs(p(x) - std::exp(-x * x / 2) / std::sqrt(2 * std::numbers::pi)));
    CHECK(err < 1e-8);
  }
  SUBCASE("chi-square moments") {
    for (double nu : {1.0, 2.0, 3.0}) {
      const auto p = density_from_tau(TauModel(PearsonSpec::centered_gamma(nu)));
      CHECK(std::abs(p.moment(0) - 1.0) < 1e-6);
      CHECK(std::abs(p.moment(1)) < 1e-6);
      CHECK(std::abs(p.moment(2) - 2 * nu) < 1e-6);
      CHECK(std::abs(p.moment(3) - 8 * nu) < 1e-6);
      CHECK(std::abs(p.moment(4) - (48 * nu + 12 * nu * nu)) < 1e-6);
    }
  }
  SUBCASE("uniform") {
    const auto p = density_from_tau(TauModel(PearsonSpec::uniform()));
    double err = 0.0;
    for (double x : interior_grid(-1, 1, 99)) err = std::max(err, std::abs(p(x) - 0.5));
    CHECK(err < 1e-8);
  }
  SUBCASE("quadrature exponent agrees with the closed form") {
    for (const auto& spec : {PearsonSpec::gaussian(), PearsonSpec::centered_gamma(1.5), PearsonSpec::uniform(),
                             PearsonSpec{-1.0, 0.0, 1.0, -1.0, 1.0}, PearsonSpec{0.5, 0.2, 1.0, -kInf, kInf}}) {
      const TauModel closed(spec);
      const TauModel generic([spec](double x) { return spec.tau(x); }, spec.a, spec.b);
      for (double x : {-0.9, -0.3, 0.0, 0.4, 0.95})
        if (x > spec.a && x < spec.b) CHECK(generic.exponent(x) == doctest::Approx(closed.exponent(x)).epsilon(1e-10));
    }
  }
  SUBCASE("round trip") {
    for (const auto& spec : {PearsonSpec::gaussian(), PearsonSpec::centered_gamma(1.0), PearsonSpec::centered_gamma(2.0),
                             PearsonSpec::uniform()}) {
      const auto tau = tau_from_density(density_from_tau(TauModel(spec)));
      const double lo = std::isinf(spec.a) ? -5.0 : spec.a;
      const double hi = std::isinf(spec.b) ? 15.0 : spec.b;
      double err = 0.0;
      for (double x : interior_grid(lo, hi, 41)) err = std::max(err, std::abs(tau(x) - spec.tau(x)));
      CHECK(err < 1e-6);
    }
  }
  SUBCASE("non-exploding tau") {
    CHECK_THROWS_AS(TauModel([](double) { return 1.0; }, -1.0, 1.0), InvalidArgument);
  }
}

TEST_CASE("stein_solve") {
  const TauModel gauss(PearsonSpec::gaussian());
  SUBCASE("gaussian indicator matches the classical solution") {
    for (double z : {-1.0, 0.0, 1.0}) {
      const auto sol = stein_solve(gauss, indicator(z));
      CHECK(sol.expectation() == doctest::Approx(normal_cdf(z)).epsilon(1e-12));
      for (double x : {-3.0, -0.5, 0.2, 2.5}) {
        const double phi = std::exp(-x * x / 2) / std::sqrt(2 * std::numbers::pi);
        const double expected = x <= z ? normal_cdf(x) * (1 - normal_cdf(z)) / phi
                                       : normal_cdf(z) * (1 - normal_cdf(x)) / phi;
        CHECK(sol.value(x) == doctest::Approx(expected).epsilon(1e-9));
      }
      double sup_u = 0.0;
      double sup_du = 0.0;
      for (double x : interior_grid(-8, 8, 1601)) {
        sup_u = std::max(sup_u, std::abs(sol.value(x)));
        sup_du = std::max(sup_du, std::abs(sol.derivative(x)));
      }
      CHECK(sup_u <= std::sqrt(2 * std::numbers::pi) / 4 + 1e-6);
      CHECK(sup_du <= 1 + 1e-6);
    }
  }
  SUBCASE("constant test function") {
    const auto sol = stein_solve(gauss, {[](double) { return 0.7; }, {}});
    for (double x : {-2.0, 0.0, 1.3}) CHECK(std::abs(sol.value(x)) < 1e-12);
  }
  SUBCASE("equation residual by finite differences") {
    const std::vector<std::pair<PearsonSpec, TestFunction>> cases{
        {PearsonSpec::gaussian(), {[](double x) { return std::tanh(x); }, {}}},
        {PearsonSpec::centered_gamma(1.0), {[](double x) { return std::cos(x); }, {}}},
        {PearsonSpec::uniform(), {[](double x) { return x > 0.2 ? 1.0 : -0.5; }, {0.2}}},
        {PearsonSpec{0.5, 0.2, 1.0, -kInf, kInf}, {[](double x) { return std::sin(2 * x); }, {}}},
    };
    for (const auto& [spec, h] : cases) {
      const TauModel model(spec);
      const auto sol = stein_solve(model, h);
      const double lo = std::isinf(spec.a) ? -4.0 : spec.a + 0.05;
      const double hi = std::isinf(spec.b) ? 4.0 : spec.b - 0.05;
      double worst = 0.0;
      for (double x : interior_grid(lo, hi, 60)) {
        bool near_jump = false;
        for (double c : h.breakpoints) near_jump |= std::abs(x - c) < 1e-3;
        if (near_jump) continue;
        const double s = 1e-4;
        const double du = (sol.value(x + s) - sol.value(x - s)) / (2 * s);
        worst = std::max(worst, std::abs(model.tau(x) * du - x * sol.value(x) - (h.h(x) - sol.expectation())));
      }
      CHECK(worst < 1e-6);
    }
  }
  SUBCASE("tails") {
    const TauModel gamma(PearsonSpec::centered_gamma(1.0));
    const auto sol = stein_solve(gamma, {[](double x) { return std::cos(x); }, {}});
    CHECK(sol.value(-2.0) == doctest::Approx((std::cos(-2.0) - sol.expectation()) / -2.0));
  }
}

TEST_CASE("stein_bound_check") {
  SUBCASE("gaussian step") {
    const auto sol = stein_solve(TauModel(PearsonSpec::gaussian()), {[](double x) { return x < 0 ? -0.5 : 0.5; }, {0.0}});
    const auto c = stein_bound_check(sol);
    CHECK(c.pass6);
    CHECK(c.passK);
    CHECK(c.K == 6.0);
  }
  SUBCASE("zero test function") {
    const auto sol = stein_solve(TauModel(PearsonSpec::gaussian()), {[](double) { return 0.0; }, {}});
    const auto c = stein_bound_check(sol);
    CHECK(c.sup_xU == 0.0);
    CHECK(c.sup_tauU == 0.0);
    CHECK(c.pass6);
    CHECK(c.passK);
  }
  SUBCASE("gamma with a clipped cosine") {
    const auto sol = stein_solve(TauModel(PearsonSpec::centered_gamma(1.0)),
                                 {[](double x) { return std::clamp(2 * std::cos(x), -1.0, 1.0); }, {}});
    const auto c = stein_bound_check(sol);
    CHECK(c.pass6);
    CHECK(c.passK);
  }
  SUBCASE("K for a finite support") {
    const auto sol = stein_solve(TauModel(PearsonSpec{-2.0, 0.0, 0.125, -0.25, 0.25}), {[](double x) { return std::sin(x); }, {}});
    CHECK(stein_bound_check(sol).K == doctest::Approx(8.0));
  }
}

TEST_CASE("pearson_classify") {
  const auto g = pearson_classify(PearsonSpec::gaussian());
  CHECK(g.log_derivative(1.3) == doctest::Approx(-1.3));
  CHECK(g.printed_a1 == 1.0);
  const double nu = 1.5;
  const auto c = pearson_classify(PearsonSpec::centered_gamma(nu));
  for (double x : {-1.0, 0.0, 2.0}) CHECK(c.log_derivative(x) == doctest::Approx(-(2 + x) / (2 * x + 2 * nu)));
  // arcsine law on (-1, 1): compare with the numerical log-derivative of the density
  const PearsonSpec arcsine{-1.0, 0.0, 1.0, -1.0, 1.0};
  const auto a = pearson_classify(arcsine);
  const auto p = density_from_tau(TauModel(arcsine));
  for (double x : {-0.8, -0.2, 0.3, 0.7}) {
    const double s = 1e-5;
    const double numeric = (std::log(p(x + s)) - std::log(p(x - s))) / (2 * s);
    CHECK(a.log_derivative(x) == doctest::Approx(numeric).epsilon(1e-6));
    CHECK(a.log_derivative(x) == doctest::Approx(x / (1 - x * x)));
  }
}

TEST_CASE("char_residual") {
  const auto id = [](double x) { return x; };
  const auto one = [](double) { return 1.0; };
  CHECK(std::abs(char_residual(TauModel(PearsonSpec::gaussian()), id, one)) < 1e-10);
  CHECK(std::abs(char_residual(TauModel(PearsonSpec::centered_gamma(2.5)), id, one)) < 1e-9);
  const double r = char_residual(TauModel(PearsonSpec::gaussian()), [](double x) { return std::sin(x); },
                                 [](double x) { return std::cos(x); });
  CHECK(std::abs(r) < 1e-7);
  // a mismatched law leaves a visible residual
  const double off = char_residual(TauModel(PearsonSpec::uniform()), [](double x) { return x * x * x; },
                                   [](double x) { return 3 * x * x; });
  CHECK(std::abs(off) < 1e-9);
  const double wrong = integrate([](double x) { return (3 * x * x - x * x * x * x) * 0.5; }, -1.0, 1.0);
  CHECK(std::abs(wrong) > 0.1);
}
