#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "chaosbound/error.hpp"
#include "chaosbound/tensor.hpp"
#include "random_kernels.hpp"

using namespace chaosbound;
using chaosbound::testing::random_kernel;
using chaosbound::testing::random_space;

namespace {

std::vector<double> unit(int d, int i) {
  std::vector<double> e(static_cast<std::size_t>(d), 0.0);
  e[static_cast<std::size_t>(i)] = 1.0;
  return e;
}

// Full index enumeration, last index fastest.
bool next_index(std::vector<int>& idx, int d) {
  for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k) {
    if (++idx[static_cast<std::size_t>(k)] < d) return true;
    idx[static_cast<std::size_t>(k)] = 0;
  }
  return false;
}

// Contraction by direct summation over every index pairing.
Tensor brute_contract(const Tensor& f, const Tensor& g, int r) {
  const int d = f.dim();
  const auto& G = f.space()->gram();
  const int p = f.order();
  const int q = g.order();
  Tensor out(f.space(), p + q - 2 * r);
  std::vector<int> fi(static_cast<std::size_t>(p), 0);
  do {
    std::vector<int> gi(static_cast<std::size_t>(q), 0);
    do {
      double w = f.at(fi) * g.at(gi);
      for (int k = 0; k < r; ++k) w *= G(fi[static_cast<std::size_t>(p - r + k)], gi[static_cast<std::size_t>(q - r + k)]);
      std::vector<int> oi(fi.begin(), fi.end() - r);
      oi.insert(oi.end(), gi.begin(), gi.end() - r);
      out.at(oi) += w;
    } while (next_index(gi, d));
  } while (next_index(fi, d));
  return out;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("multiset ranks enumerate the packed layout") {
  for (int d = 1; d <= 4; ++d) {
    for (int q = 0; q <= 4; ++q) {
      std::vector<int> m(static_cast<std::size_t>(q), 0);
      std::size_t k = 0;
      do {
        CHECK(multiset_rank(m) == k);
        ++k;
      } while (next_multiset(m, d));
      CHECK(k == multiset_count(d, q));
    }
  }
}

TEST_CASE("tensor_power") {
  auto space = GramSpace::identity(2);
  SUBCASE("rank-one square") {
    auto f = tensor_power(space, unit(2, 0), 2);
    CHECK(f.coefficient(std::vector{0, 0}) == 1.0);
    CHECK(f.coefficient(std::vector{0, 1}) == 0.0);
    CHECK(f.coefficient(std::vector{1, 1}) == 0.0);
  }
  SUBCASE("order zero is the scalar one") {
    auto f = tensor_power(space, unit(2, 0), 0);
    CHECK(f.order() == 0);
    CHECK(f.packed()[0] == 1.0);
  }
  SUBCASE("sum of basis vectors") {
    auto f = tensor_power(space, std::vector{1.0, 1.0}, 2);
    CHECK(f.coefficient(std::vector{0, 0}) == doctest::Approx(1.0));
    CHECK(f.coefficient(std::vector{0, 1}) == doctest::Approx(2.0));
    CHECK(f.coefficient(std::vector{1, 1}) == doctest::Approx(1.0));
    const Tensor t = to_tensor(f);
    for (double v : t.data()) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("negative order") { CHECK_THROWS_AS(tensor_power(space, unit(2, 0), -1), InvalidOrder); }
}

TEST_CASE("symmetrize") {
  auto space = GramSpace::identity(3);
  SUBCASE("two-slot average") {
    Tensor t(space, 2);
    t.at(std::vector{0, 1}) = 1.0;
    const Tensor s = to_tensor(symmetrize(t));
    CHECK(s.at(std::vector{0, 1}) == doctest::Approx(0.5));
    CHECK(s.at(std::vector{1, 0}) == doctest::Approx(0.5));
    CHECK(s.at(std::vector{0, 0}) == 0.0);
  }
  SUBCASE("fixed point") {
    Tensor t(space, 2);
    t.at(std::vector{0, 0}) = 1.0;
    const Tensor s = to_tensor(symmetrize(t));
    CHECK(max_abs_diff(s.data(), t.data()) == 0.0);
  }
  SUBCASE("six permutations") {
    Tensor t(space, 3);
    t.at(std::vector{0, 1, 2}) = 1.0;
    const Tensor s = to_tensor(symmetrize(t));
    const std::vector<std::vector<int>> perms{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (const auto& p : perms) CHECK(s.at(p) == doctest::Approx(1.0 / 6.0));
  }
  SUBCASE("idempotent") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    for (int q = 1; q <= 3; ++q) {
      Tensor t(space, q);
      for (double& v : t.data()) v = normal(rng);
      const Tensor once = to_tensor(symmetrize(t));
      const Tensor twice = to_tensor(symmetrize(once));
      CHECK(max_abs_diff(once.data(), twice.data()) <= 1e-14);
    }
  }
}

TEST_CASE("contract examples") {
  auto space = GramSpace::identity(2);
  SUBCASE("r = 0 is the tensor product") {
    const auto e1 = tensor_power(space, unit(2, 0), 1);
    const auto e2 = tensor_power(space, unit(2, 1), 1);
    const Tensor t = contract(e1, e2, 0);
    CHECK(t.at(std::vector{0, 1}) == 1.0);
    CHECK(t.at(std::vector{1, 0}) == 0.0);
  }
  SUBCASE("full contraction is the inner product") {
    const auto f = tensor_power(space, unit(2, 0), 2);
    const Tensor t = contract(f, f, 2);
    CHECK(t.order() == 0);
    CHECK(t[0] == doctest::Approx(1.0));
  }
  SUBCASE("half identity squared") {
    SymKernel f(space, 2);
    f.set_coefficient(std::vector{0, 0}, 0.5);
    f.set_coefficient(std::vector{1, 1}, 0.5);
    const Tensor t = contract(f, f, 1);
    CHECK(t.at(std::vector{0, 0}) == doctest::Approx(0.25));
    CHECK(t.at(std::vector{1, 1}) == doctest::Approx(0.25));
    CHECK(t.at(std::vector{0, 1}) == doctest::Approx(0.0));
  }
  SUBCASE("errors") {
    const auto f = tensor_power(space, unit(2, 0), 2);
    CHECK_THROWS_AS(contract(f, f, 3), InvalidContraction);
    CHECK_THROWS_AS(contract(f, f, -1), InvalidContraction);
    const auto other = tensor_power(GramSpace::identity(2), unit(2, 0), 2);
    CHECK_NOTHROW(contract(f, other, 1));
    const auto wider = tensor_power(GramSpace::identity(3), unit(3, 0), 2);
    CHECK_THROWS_AS(contract(f, wider, 1), SpaceMismatch);
  }
}

TEST_CASE("gram_inner examples") {
  Eigen::MatrixXd g(2, 2);
  g << 1.0, 0.3, 0.3, 1.0;
  auto correlated = GramSpace::make(g);
  auto identity = GramSpace::identity(2);
  const auto e1 = tensor_power(correlated, unit(2, 0), 1);
  const auto e2 = tensor_power(correlated, unit(2, 1), 1);
  CHECK(gram_inner(e1, e1) == doctest::Approx(1.0));
  CHECK(gram_inner(e1, e2) == doctest::Approx(0.3));
  SymKernel e12(identity, 2);
  e12.set_coefficient(std::vector{0, 1}, 1.0);  // full entries 1/2 at (0,1) and (1,0)
  Tensor raw(identity, 2);
  raw.at(std::vector{0, 1}) = 1.0;
  CHECK(gram_inner(raw, raw) == doctest::Approx(1.0));
  CHECK(gram_inner(e12, e12) == doctest::Approx(0.5));
  CHECK_THROWS_AS(gram_inner(e1, tensor_power(correlated, unit(2, 0), 2)), InvalidOrder);
}

TEST_CASE("random kernel properties") {
  std::mt19937_64 rng(20240611);
  for (int seed = 0; seed < 50; ++seed) {
    const int d = 2 + seed % 3;
    auto space = random_space(d, rng);
    const int p = 1 + seed % 3;
    const int q = 1 + (seed / 3) % 3;
    const auto f = random_kernel(space, p, rng);
    const auto g = random_kernel(space, q, rng);
    for (int r = 0; r <= std::min(p, q); ++r) {
      const Tensor fast = contract(f, g, r);
      const Tensor slow = brute_contract(to_tensor(f), to_tensor(g), r);
      CHECK(max_abs_diff(fast.data(), slow.data()) <= 1e-11);
      // symmetrization does not increase the norm
      CHECK(norm(contract_sym(f, g, r)) <= norm(fast) + 1e-12);
    }
    // ||f (x)_r g||^2 = <f (x)_{p-r} f, g (x)_{q-r} g>
    for (int r = 1; r <= std::min(p, q); ++r) {
      const double lhs = norm_squared(contract(f, g, r));
      const double rhs = gram_inner(contract(f, f, p - r), contract(g, g, q - r));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
    // packed inner product matches dense inner product
    const auto f2 = random_kernel(space, p, rng);
    CHECK(gram_inner(f, f2) == doctest::Approx(gram_inner(to_tensor(f), to_tensor(f2))).epsilon(1e-12));
  }
}

TEST_CASE("rank-one product contracts to the product of norms") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 10; ++trial) {
    auto space = random_space(3, rng);
    std::vector<double> h(3), k(3);
    for (auto& v : h) v = normal(rng);
    for (auto& v : k) v = normal(rng);
    const auto f = tensor_power(space, h, 2);
    const auto g = tensor_power(space, k, 1);
    const Tensor fg = contract(f, g, 0);
    const double full = contract(fg, fg, 3)[0];
    CHECK(full == doctest::Approx(gram_inner(f, f) * gram_inner(g, g)).epsilon(1e-12));
  }
}
