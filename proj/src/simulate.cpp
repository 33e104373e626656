#include "chaosbound/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <thread>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>
#include <gsl/gsl_integration.h>
#include <unsupported/Eigen/FFT>

#include "chaosbound/breuer_major.hpp"
#include "chaosbound/chaos.hpp"
#include "chaosbound/error.hpp"

namespace chaosbound {

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// Runs work(b) for every batch index b in [0, batches) on up to `threads` workers.
template <class Work>
void for_batches(int batches, int threads, Work work) {
  threads = std::clamp(threads, 1, std::max(1, batches));
  if (threads == 1) {
    for (int b = 0; b < batches; ++b) work(b);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int b = next++; b < batches && !failed; b = next++) {
        try {
          work(b);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Stationary Gaussian vectors with autocovariance rho_H, drawn batch by batch.
class IncrementGenerator {
 public:
  IncrementGenerator(double H, int n, bool force_cholesky) : n_(n) {
    if (!(H > 0.0 && H < 1.0)) throw InvalidArgument("sample_fbm_increments: H must lie in (0, 1)");
    if (n < 1) throw InvalidArgument("sample_fbm_increments: n must be >= 1");
    std::string note;
    if (n > kCirculantThreshold && !force_cholesky) {
      if (setup_circulant(H)) {
        meta_ = fmt::format("fbm H={} n={} generator=circulant batch_rows={}", H, n, kBatchRows);
        return;
      }
      note = " fallback=circulant-not-psd";
    }
    Eigen::MatrixXd R(n, n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) R(k, l) = rho(H, k - l);
    Eigen::LLT<Eigen::MatrixXd> llt(R);
    if (llt.info() != Eigen::Success) throw AccuracyError("sample_fbm_increments: Cholesky factorization failed");
    lower_ = llt.matrixL();
    meta_ = fmt::format("fbm H={} n={} generator=cholesky{} batch_rows={}", H, n, note, kBatchRows);
  }

  const std::string& meta() const { return meta_; }

  Eigen::MatrixXd draw(std::mt19937_64& rng, int rows) const {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd out(rows, n_);
    if (circulant_) {
      const int m = static_cast<int>(scale_.size());
      Eigen::FFT<double> fft;
      std::vector<std::complex<double>> w(m);
      std::vector<std::complex<double>> y;
      for (int r = 0; r < rows; r += 2) {
        for (int j = 0; j < m; ++j) {
          const double re = normal(rng);
          const double im = normal(rng);
          w[j] = scale_[j] * std::complex<double>(re, im);
        }
        fft.fwd(y, w);
        // real and imaginary parts are two independent draws
        for (int k = 0; k < n_; ++k) out(r, k) = y[k].real();
        if (r + 1 < rows)
          for (int k = 0; k < n_; ++k) out(r + 1, k) = y[k].imag();
      }
      return out;
    }
    Eigen::MatrixXd z(rows, n_);
    for (int r = 0; r < rows; ++r)
      for (int k = 0; k < n_; ++k) z(r, k) = normal(rng);
    out.noalias() = z * lower_.transpose();
    return out;
  }

 private:
  // Embeds the Toeplitz covariance in a circulant of size 2n; its eigenvalues
  // must be nonnegative up to rounding.
  bool setup_circulant(double H) {
    const int m = 2 * n_;
    std::vector<std::complex<double>> c(m);
    for (int j = 0; j < m; ++j) c[j] = rho(H, j <= n_ ? j : m - j);
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> lambda;
    fft.fwd(lambda, c);
    double top = 0.0;
    for (const auto& l : lambda) top = std::max(top, std::abs(l.real()));
    scale_.assign(m, 0.0);
    for (int j = 0; j < m; ++j) {
      const double l = lambda[j].real();
      if (l < -1e-10 * top) return false;
      scale_[j] = std::sqrt(std::max(l, 0.0) / m);
    }
    circulant_ = true;
    return true;
  }

  int n_;
  bool circulant_ = false;
  std::vector<double> scale_;
  Eigen::MatrixXd lower_;
  std::string meta_;
};

int batch_count(int count) { return (count + kBatchRows - 1) / kBatchRows; }

int batch_rows(int count, int b) { return std::min(kBatchRows, count - b * kBatchRows); }

// Gauss-Legendre nodes and weights on [0, 1].
std::vector<std::pair<double, double>> legendre_unit(int points) {
  if (points < 1) throw InvalidArgument("chatterjee_weight: need at least one quadrature node");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(points), &gsl_integration_glfixed_table_free);
  if (!table) throw InvalidArgument("chatterjee_weight: cannot build a Gauss-Legendre rule");
  std::vector<std::pair<double, double>> rule(points);
  for (int i = 0; i < points; ++i)
    gsl_integration_glfixed_point(0.0, 1.0, i, &rule[i].first, &rule[i].second, table.get());
  return rule;
}

double chatterjee_sample(const Gradient& grad, const Eigen::VectorXd& g0, const Eigen::VectorXd& v,
                         const Eigen::VectorXd& w, const std::vector<std::pair<double, double>>& rule) {
  double s = 0.0;
  for (const auto& [u, weight] : rule) s += weight * g0.dot(grad(u * v + std::sqrt(1.0 - u * u) * w));
  return s;
}

McEstimate summarize(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double se = x.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return {mean, se};
}

}  // namespace

FbmSample sample_fbm_increments(double H, int n, int count, std::uint64_t seed, const SimOptions& options) {
  if (count < 0) throw InvalidArgument("sample_fbm_increments: count must be >= 0");
  const IncrementGenerator gen(H, n, options.force_cholesky);
  FbmSample out;
  out.seed = seed;
  out.meta = gen.meta();
  out.increments.resize(count, n);
  for_batches(batch_count(count), options.threads, [&](int b) {
    auto rng = stream(seed, static_cast<std::uint64_t>(b));
    const int rows = batch_rows(count, b);
    out.increments.middleRows(static_cast<Eigen::Index>(b) * kBatchRows, rows) = gen.draw(rng, rows);
  });
  return out;
}

SampleBatch sample_Zn(double H, int q, int n, int count, std::uint64_t seed, const SimOptions& options) {
  validate(BmInstance{H, q, n});
  if (count < 0) throw InvalidArgument("sample_Zn: count must be >= 0");
  const double scale = 1.0 / (sigma(H, q) * std::sqrt(static_cast<double>(n)));
  const IncrementGenerator gen(H, n, options.force_cholesky);
  SampleBatch out;
  out.seed = seed;
  out.meta = fmt::format("Z_n q={} {}", q, gen.meta());
  out.values.resize(count);
  for_batches(batch_count(count), options.threads, [&](int b) {
    auto rng = stream(seed, static_cast<std::uint64_t>(b));
    const int rows = batch_rows(count, b);
    const Eigen::MatrixXd v = gen.draw(rng, rows);
    for (int r = 0; r < rows; ++r) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += hermite(q, v(r, k));
      out.values[static_cast<std::size_t>(b) * kBatchRows + r] = scale * s;
    }
  });
  return out;
}

double empirical_kolmogorov(std::span<const double> samples, const RealFunction& cdf) {
  if (samples.empty()) throw InvalidArgument("empirical_kolmogorov: empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  for (double v : x)
    if (std::isnan(v)) throw InvalidArgument("empirical_kolmogorov: NaN sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < x.size();) {
    std::size_t j = i;
    while (j < x.size() && x[j] == x[i]) ++j;  // ties form one jump
    const double f = cdf(x[i]);
    sup = std::max({sup, std::abs(static_cast<double>(i) / n - f), std::abs(static_cast<double>(j) / n - f)});
    i = j;
  }
  return sup;
}

double empirical_wasserstein(std::span<const double> samples, const RealFunction& quantile) {
  if (samples.empty()) throw InvalidArgument("empirical_wasserstein: empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += std::abs(x[i] - quantile((static_cast<double>(i) + 0.5) / n));
  return total / n;
}

double dkw_allowance(std::size_t samples, double delta) {
  if (samples == 0) throw InvalidArgument("dkw_allowance: empty sample");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("dkw_allowance: delta must lie in (0, 1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(samples)));
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double standard_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("standard_normal_quantile: p must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

McEstimate chatterjee_weight(const Gradient& grad, const Eigen::VectorXd& v, int t_nodes, int mc_count,
                             std::uint64_t seed) {
  if (!grad) throw InvalidArgument("chatterjee_weight: missing gradient");
  if (mc_count < 1) throw InvalidArgument("chatterjee_weight: mc_count must be >= 1");
  const auto rule = legendre_unit(t_nodes);
  const Eigen::VectorXd g0 = grad(v);
  if (g0.size() != v.size()) throw InvalidArgument("chatterjee_weight: gradient has the wrong dimension");
  auto rng = stream(seed, 0);
  std::normal_distribution<double> normal;
  std::vector<double> draws(mc_count);
  Eigen::VectorXd w(v.size());
  for (int j = 0; j < mc_count; ++j) {
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = normal(rng);
    draws[j] = chatterjee_sample(grad, g0, v, w, rule);
  }
  return summarize(draws);
}

double IdentityCheck::z_score() const {
  const double se = std::hypot(lhs.std_error, rhs.std_error);
  const double gap = std::abs(lhs.value - rhs.value);
  if (se == 0.0) return gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return gap / se;
}

IdentityCheck chatterjee_identity(const std::function<double(const Eigen::VectorXd&)>& g, const Gradient& grad,
                                  const RealFunction& f, const RealFunction& df, int dim, int samples,
                                  std::uint64_t seed, int t_nodes, int inner_count) {
  if (dim < 1) throw InvalidArgument("chatterjee_identity: dim must be >= 1");
  if (samples < 2) throw InvalidArgument("chatterjee_identity: need at least two samples");
  if (inner_count < 1) throw InvalidArgument("chatterjee_identity: inner_count must be >= 1");
  const auto rule = legendre_unit(t_nodes);
  auto rng = stream(seed, 0);
  std::normal_distribution<double> normal;
  std::vector<double> lhs(samples);
  std::vector<double> rhs(samples);
  Eigen::VectorXd v(dim);
  Eigen::VectorXd w(dim);
  for (int j = 0; j < samples; ++j) {
    for (int i = 0; i < dim; ++i) v[i] = normal(rng);
    const double y = g(v);
    const Eigen::VectorXd g0 = grad(v);
    // inner Monte Carlo keeps S(V) unbiased given V
    double s = 0.0;
    for (int k = 0; k < inner_count; ++k) {
      for (int i = 0; i < dim; ++i) w[i] = normal(rng);
      s += chatterjee_sample(grad, g0, v, w, rule);
    }
    s /= inner_count;
    lhs[j] = y * f(y);
    rhs[j] = s * df(y);
  }
  return {summarize(lhs), summarize(rhs)};
}

}  // namespace chaosbound
