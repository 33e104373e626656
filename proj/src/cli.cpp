#include "chaosbound/cli.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <fmt/format.h>

#include "chaosbound/breuer_major.hpp"
#include "chaosbound/error.hpp"
#include "chaosbound/tensor.hpp"

namespace chaosbound {

namespace {

constexpr const char* kVersion = "0.1.0";

const std::set<std::string> kCommands{"bound", "breuer-major", "gamma", "chi2-example", "pearson", "simulate"};

struct OutputFile {
  std::string name;
  std::string text;
};

struct Result {
  std::vector<OutputFile> files;
  Json summary = Json::object();
};

// Typed access to the flat parameter map. Wrong types are parse errors; values
// outside an operation's domain are precondition errors.
class Params {
 public:
  Params(const Json& j, std::string command) : j_(j), command_(std::move(command)) {}

  bool has(const char* key) const { return j_.contains(key); }

  const Json& raw(const char* key) const {
    const auto it = j_.find(key);
    if (it == j_.end()) throw ParseError(command_ + ": missing parameter '" + key + "'");
    return *it;
  }

  double real(const char* key) const {
    const Json& v = raw(key);
    if (!v.is_number()) throw ParseError(command_ + ": parameter '" + key + "' must be a number");
    return v.get<double>();
  }

  double real(const char* key, double fallback) const { return has(key) ? real(key) : fallback; }

  long long integer(const char* key) const {
    const Json& v = raw(key);
    if (!v.is_number_integer()) throw ParseError(command_ + ": parameter '" + key + "' must be an integer");
    return v.get<long long>();
  }

  long long integer(const char* key, long long fallback) const { return has(key) ? integer(key) : fallback; }

  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const Json& v = raw(key);
    if (!v.is_string()) throw ParseError(command_ + ": parameter '" + key + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<int> int_list(const char* key) const {
    const Json& v = raw(key);
    if (!v.is_array() || v.empty()) throw ParseError(command_ + ": parameter '" + key + "' must be a nonempty array");
    std::vector<int> out;
    for (const Json& x : v) {
      if (!x.is_number_integer()) throw ParseError(command_ + ": '" + key + "' must hold integers");
      out.push_back(x.get<int>());
    }
    return out;
  }

  std::uint64_t seed(const RunOptions& options) const {
    if (options.seed) return *options.seed;
    if (!has("seed")) return 0;
    const Json& v = raw("seed");
    if (!v.is_number_unsigned()) throw ParseError(command_ + ": seed must be a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  const std::string& command() const { return command_; }

 private:
  const Json& j_;
  std::string command_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

int checked_int(long long v, const std::string& what, long long lo, long long hi) {
  require(v >= lo && v <= hi, fmt::format("{} must lie in [{}, {}], got {}", what, lo, hi, v));
  return static_cast<int>(v);
}

SymKernel load_kernel(const Json& ref, const std::filesystem::path& base, const SpacePtr& space = nullptr) {
  if (ref.is_object()) return kernel_from_json(ref, space);
  if (!ref.is_string()) throw ParseError("kernel reference must be a file path or an inline kernel object");
  std::filesystem::path p = ref.get<std::string>();
  if (p.is_relative()) p = base / p;
  return kernel_from_json(read_json_file(p), space);
}

std::string describe(const Json& ref) { return ref.is_string() ? ref.get<std::string>() : std::string("inline"); }

BmPath parse_path(const std::string& s) {
  if (s == "auto") return BmPath::Auto;
  if (s == "naive") return BmPath::Naive;
  if (s == "difference") return BmPath::DifferenceSum;
  if (s == "fast") return BmPath::Fast;
  throw ParseError("breuer-major: path must be one of auto, naive, difference, fast");
}

using Plan = std::function<Result()>;

// Every builder parses and validates all inputs, then returns the computation.

Plan plan_bound(const Params& p, const ExperimentConfig& c) {
  std::vector<Json> refs;
  if (p.has("kernels")) {
    const Json& ks = p.raw("kernels");
    if (!ks.is_array() || ks.empty()) throw ParseError("bound: kernels must be a nonempty array");
    refs.assign(ks.begin(), ks.end());
  } else {
    refs.push_back(p.raw("kernel"));
  }
  const Metric metric = parse_metric(p.text("metric", "Kolmogorov"));
  std::vector<SymKernel> kernels;
  kernels.push_back(load_kernel(refs[0], c.base_dir));
  for (std::size_t i = 1; i < refs.size(); ++i) kernels.push_back(load_kernel(refs[i], c.base_dir, kernels[0].space()));
  for (const auto& k : kernels) require(k.order() >= 1, "bound: kernels must have order >= 1");
  std::string names;
  std::string orders;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    names += (i ? ";" : "") + describe(refs[i]);
    orders += (i ? ";" : "") + std::to_string(kernels[i].order());
  }
  return [=]() {
    const BoundReport r = kernels.size() == 1 ? gauss_bound_single(kernels[0], metric) : gauss_bound_sum(kernels, metric);
    CsvTable t({"kernels", "orders", "dim", "metric", "variance_term", "squared_total", "bound",
                "unsymmetrized_squared_total"});
    auto cells = report_csv_cells(r);
    t.add_row({names, orders, std::to_string(kernels[0].dim()), cells[0], cells[1], cells[2], cells[3],
               r.unsymmetrized_squared_total ? format_real(*r.unsymmetrized_squared_total) : ""});
    Result res;
    res.files.push_back({"bound.csv", t.str()});
    res.files.push_back({"bound_report.json", report_to_json(r).dump(2) + "\n"});
    res.summary["bound"] = r.bound;
    return res;
  };
}

Plan plan_breuer_major(const Params& p) {
  const double H = p.real("H");
  const int q = checked_int(p.integer("q"), "breuer-major: q", 2, 64);
  const std::vector<int> ns = p.int_list("ns");
  BmOptions opts;
  opts.path = parse_path(p.text("path", "auto"));
  for (int n : ns) validate(BmInstance{H, q, n});
  require(opts.path != BmPath::Fast || q == 2, "breuer-major: the fast path requires q = 2");
  return [=]() {
    const BmRate rate = bm_rate(H, q);
    CsvTable t({"H", "q", "n", "variance_term", "squared_total", "kol_bound", "rate_exponent"});
    std::vector<double> xs;
    std::vector<double> ys;
    for (const BmRow& row : bm_table(H, q, ns, opts)) {
      t.add_row({format_real(H), std::to_string(q), std::to_string(row.n), format_real(row.report.variance_term),
                 format_real(row.report.squared_total), format_real(row.exact_bound), format_real(-rate.exponent)});
      xs.push_back(row.n);
      ys.push_back(row.exact_bound);
    }
    Result res;
    res.files.push_back({"breuer_major.csv", t.str()});
    res.summary["regime"] = rate.regime;
    res.summary["rate_exponent"] = -rate.exponent;
    if (xs.size() >= 2 && std::all_of(ys.begin(), ys.end(), [](double y) { return y > 0.0; }))
      res.summary["slope"] = loglog_slope(xs, ys);
    return res;
  };
}

Plan plan_gamma(const Params& p, const ExperimentConfig& c) {
  const Metric metric = parse_metric(p.text("metric", "H2"));
  CsvTable header({"mode", "kernels", "orders", "nu", "metric", "variance_term", "squared_total", "bound"});
  if (p.has("moments")) {
    const Json& m = p.raw("moments");
    const Params mp(m, "gamma moments");
    const double nu = p.real("nu");
    const double m2 = mp.real("m2");
    const double m3 = mp.real("m3");
    const double m4 = mp.real("m4");
    require(nu > 0.0, "gamma: nu must be > 0");
    return [=]() {
      const double interior = second_chaos_gamma_interior(nu, m2, m3, m4);
      const double bound = second_chaos_gamma_bound(nu, m2, m3, m4);
      CsvTable t = header;
      t.add_row({"moments", "", "2", format_real(nu), "", format_real((m2 - 2 * nu) * (m2 - 2 * nu)),
                 format_real(interior), format_real(bound)});
      Result res;
      res.files.push_back({"gamma.csv", t.str()});
      res.summary["bound"] = bound;
      return res;
    };
  }
  if (p.has("kernels")) {
    const Json& ks = p.raw("kernels");
    const Json& nus = p.raw("nus");
    if (!ks.is_array() || ks.size() != 2 || !nus.is_array() || nus.size() != 2 || !nus[0].is_number() ||
        !nus[1].is_number())
      throw ParseError("gamma: kernels and nus must be arrays of two entries");
    const SymKernel f1 = load_kernel(ks[0], c.base_dir);
    const SymKernel f2 = load_kernel(ks[1], c.base_dir, f1.space());
    const double nu1 = nus[0].get<double>();
    const double nu2 = nus[1].get<double>();
    require(nu1 > 0.0 && nu2 > 0.0, "gamma: nus must be > 0");
    require(f1.order() % 2 == 0 && f2.order() % 2 == 0 && f2.order() > 2 * f1.order(),
            "gamma: orders must be even with q2 > 2 q1");
    const std::string names = describe(ks[0]) + ";" + describe(ks[1]);
    return [=]() {
      const BoundReport r = gamma_bound_sum(f1, nu1, f2, nu2, metric);
      CsvTable t = header;
      t.add_row({"sum", names, fmt::format("{};{}", f1.order(), f2.order()), format_real(nu1 + nu2),
                 to_string(r.metric), format_real(r.variance_term), format_real(r.squared_total), format_real(r.bound)});
      Result res;
      res.files.push_back({"gamma.csv", t.str()});
      res.files.push_back({"gamma_report.json", report_to_json(r).dump(2) + "\n"});
      res.summary["bound"] = r.bound;
      return res;
    };
  }
  const Json ref = p.raw("kernel");
  const SymKernel g = load_kernel(ref, c.base_dir);
  const double nu = p.real("nu");
  require(nu > 0.0, "gamma: nu must be > 0");
  require(g.order() >= 2 && g.order() % 2 == 0, "gamma: kernel order must be even and >= 2");
  require(metric == Metric::H2 || (metric == Metric::H1 && nu == std::floor(nu)),
          "gamma: metric must be H2, or H1 with integer nu");
  return [=]() {
    const BoundReport r = gamma_bound_single(g, nu, metric);
    CsvTable t = header;
    t.add_row({"single", describe(ref), std::to_string(g.order()), format_real(nu), to_string(r.metric),
               format_real(r.variance_term), format_real(r.squared_total), format_real(r.bound)});
    Result res;
    res.files.push_back({"gamma.csv", t.str()});
    res.files.push_back({"gamma_report.json", report_to_json(r).dump(2) + "\n"});
    res.summary["bound"] = r.bound;
    return res;
  };
}

// F_n = (1/n) sum_{k,l} a(k - l) (G_k G_l - delta_kl) with a(0) = 1 and
// a(r) = 1 + decay^{|r|} otherwise, measured against F(1) = N^2 - 1.
SymKernel chi2_kernel(int n, double decay) {
  const auto space = GramSpace::identity(n);
  SymKernel f(space, 2);
  for (int k = 0; k < n; ++k) {
    for (int l = k; l < n; ++l) {
      const int r = l - k;
      const double a = r == 0 ? 1.0 : 1.0 + std::pow(decay, r);
      const std::array<int, 2> m{k, l};
      f.set_coefficient(m, a / n * ordering_count(m));
    }
  }
  return f;
}

Plan plan_chi2(const Params& p) {
  std::vector<int> ns{16, 32, 64, 128, 256, 512};
  if (p.has("ns")) ns = p.int_list("ns");
  const double decay = p.real("decay", 0.5);
  require(decay >= 0.0 && decay < 1.0, "chi2-example: decay must lie in [0, 1)");
  for (int n : ns) checked_int(n, "chi2-example: n", 1, 4096);
  return [=]() {
    CsvTable t({"n", "decay", "nu", "metric", "variance_term", "squared_total", "bound"});
    std::vector<double> xs;
    std::vector<double> ys;
    for (int n : ns) {
      const BoundReport r = gamma_bound_single(chi2_kernel(n, decay), 1.0, Metric::H1);
      t.add_row({std::to_string(n), format_real(decay), "1", to_string(r.metric), format_real(r.variance_term),
                 format_real(r.squared_total), format_real(r.bound)});
      xs.push_back(n);
      ys.push_back(r.bound);
    }
    Result res;
    res.files.push_back({"chi2_example.csv", t.str()});
    if (xs.size() >= 2 && std::all_of(ys.begin(), ys.end(), [](double y) { return y > 0.0; })) {
      const double slope = loglog_slope(xs, ys);
      CsvTable s({"n_min", "n_max", "decay", "slope"});
      s.add_row({std::to_string(*std::min_element(ns.begin(), ns.end())),
                 std::to_string(*std::max_element(ns.begin(), ns.end())), format_real(decay), format_real(slope)});
      res.files.push_back({"chi2_example_slope.csv", s.str()});
      res.summary["slope"] = slope;
    }
    return res;
  };
}

TestFunction test_function(const Params& p, std::string& label) {
  const Json& spec = p.raw("test");
  const Params t(spec, "pearson test");
  const std::string kind = t.text("kind", "");
  if (kind == "indicator") {
    const double z = t.real("z", 0.0);
    label = fmt::format("indicator(z={})", z);
    return {[z](double x) { return x <= z ? 1.0 : 0.0; }, {z}};
  }
  if (kind == "sin" || kind == "cos") {
    const double w = t.real("w", 1.0);
    label = fmt::format("{}(w={})", kind, w);
    if (kind == "sin") return {[w](double x) { return std::sin(w * x); }, {}};
    return {[w](double x) { return std::cos(w * x); }, {}};
  }
  if (kind == "tanh") {
    label = "tanh";
    return {[](double x) { return std::tanh(x); }, {}};
  }
  throw ParseError("pearson: test.kind must be one of indicator, sin, cos, tanh");
}

Plan plan_pearson(const Params& p) {
  const PearsonSpec spec = pearson_from_json(p.raw("spec"));
  std::string label;
  const TestFunction h = test_function(p, label);
  const int points = checked_int(p.integer("grid", 201), "pearson: grid", 2, 100000);
  const TauModel model(spec);
  return [=]() {
    const SteinSolution sol = stein_solve(model, h);
    const auto grid = stein_grid(model, points);
    const DensityModel density = density_from_tau(model);
    const std::vector<std::string> head{format_real(spec.alpha), format_real(spec.beta), format_real(spec.gamma),
                                        format_real(spec.a), format_real(spec.b), label};
    CsvTable t({"alpha", "beta", "gamma", "a", "b", "test", "x", "tau", "density", "U", "tau_dU"});
    for (const auto& row : sol.tabulate(grid)) {
      auto cells = head;
      for (double v : {row.x, model.tau(row.x), density(row.x), row.value, sol.tau_derivative(row.x)})
        cells.push_back(format_real(v));
      t.add_row(cells);
    }
    const SteinBoundCheck check = stein_bound_check(sol, grid);
    CsvTable s({"alpha", "beta", "gamma", "a", "b", "test", "expectation", "sup_xU", "sup_tauU", "sup_sum", "sup_h",
                "K", "pass6", "passK"});
    auto cells = head;
    for (double v : {sol.expectation(), check.sup_xU, check.sup_tauU, check.sup_sum, check.sup_h, check.K})
      cells.push_back(format_real(v));
    cells.push_back(check.pass6 ? "true" : "false");
    cells.push_back(check.passK ? "true" : "false");
    s.add_row(cells);
    Result res;
    res.files.push_back({"pearson.csv", t.str()});
    res.files.push_back({"pearson_summary.csv", s.str()});
    res.summary["pass6"] = check.pass6;
    res.summary["passK"] = check.passK;
    return res;
  };
}

Plan plan_simulate(const Params& p, const RunOptions& options) {
  const double H = p.real("H");
  const int q = checked_int(p.integer("q"), "simulate: q", 2, 64);
  const int n = checked_int(p.integer("n"), "simulate: n", 1, 1 << 20);
  const int count = checked_int(p.integer("count"), "simulate: count", 1, 100000000);
  const std::uint64_t seed = p.seed(options);
  validate(BmInstance{H, q, n});
  require(options.threads >= 1, "simulate: threads must be >= 1");
  return [=]() {
    const SampleBatch batch = sample_Zn(H, q, n, count, seed, {options.threads, false});
    double mean = 0.0;
    for (double v : batch.values) mean += v;
    mean /= count;
    double var = 0.0;
    for (double v : batch.values) var += (v - mean) * (v - mean);
    var = count > 1 ? var / (count - 1) : 0.0;
    const double kol = empirical_kolmogorov(batch.values, standard_normal_cdf);
    const double was = empirical_wasserstein(batch.values, standard_normal_quantile);
    const double bound = bm_bound_exact({H, q, n}).bound;
    CsvTable s({"H", "q", "n", "count", "seed", "mean", "variance", "kolmogorov", "wasserstein", "kol_bound",
                "dkw_allowance"});
    s.add_row({format_real(H), std::to_string(q), std::to_string(n), std::to_string(count), std::to_string(seed),
               format_real(mean), format_real(var), format_real(kol), format_real(was), format_real(bound),
               format_real(dkw_allowance(batch.values.size()))});
    Result res;
    res.files.push_back({"samples.csv", batch_to_csv(batch).str()});
    res.files.push_back({"simulate_summary.csv", s.str()});
    res.summary["kolmogorov"] = kol;
    res.summary["kol_bound"] = bound;
    res.summary["generator"] = batch.meta;
    return res;
  };
}

}  // namespace

ExperimentConfig parse_config(const Json& j, std::filesystem::path base_dir) {
  if (!j.is_object()) throw ParseError("config: expected a JSON object");
  const auto it = j.find("command");
  if (it == j.end() || !it->is_string()) throw ParseError("config: missing string field 'command'");
  const std::string command = it->get<std::string>();
  if (!kCommands.count(command)) throw ParseError("config: unknown command '" + command + "'");
  return {command, j, std::move(base_dir)};
}

std::vector<std::filesystem::path> run(const ExperimentConfig& config, const RunOptions& options, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const Params p(config.parameters, config.command);
  Plan plan;
  if (config.command == "bound") plan = plan_bound(p, config);
  else if (config.command == "breuer-major") plan = plan_breuer_major(p);
  else if (config.command == "gamma") plan = plan_gamma(p, config);
  else if (config.command == "chi2-example") plan = plan_chi2(p);
  else if (config.command == "pearson") plan = plan_pearson(p);
  else if (config.command == "simulate") plan = plan_simulate(p, options);
  else throw ParseError("config: unknown command '" + config.command + "'");

  Result result = plan();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Json manifest;
  manifest["tool"] = "chaosbound";
  manifest["version"] = kVersion;
  manifest["command"] = config.command;
  manifest["config"] = config.parameters;
  if (config.command == "simulate") manifest["seed"] = p.seed(options);
  manifest["threads"] = options.threads;
  manifest["libraries"] = {{"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
                           {"boost", fmt::format("{}.{}.{}", BOOST_VERSION / 100000, BOOST_VERSION / 100 % 1000,
                                                 BOOST_VERSION % 100)},
                           {"fmt", FMT_VERSION}};
  Json outputs = Json::array();
  for (const auto& f : result.files) outputs.push_back(f.name);
  manifest["outputs"] = outputs;
  manifest["summary"] = result.summary;
  manifest["timings"] = {{"total_seconds", seconds}};

  std::vector<std::filesystem::path> written;
  for (const auto& f : result.files) {
    written.push_back(options.out_dir / f.name);
    write_text_file(written.back(), f.text);
  }
  written.push_back(options.out_dir / "manifest.json");
  write_text_file(written.back(), manifest.dump(2) + "\n");
  log << config.command << ": " << result.summary.dump() << "\n";
  return written;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return kExitParse;
  if (dynamic_cast<const Json::exception*>(&e)) return kExitParse;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const InvalidArgument*>(&e)) return kExitPrecondition;
  return kExitFailure;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Wiener chaos and Stein bound experiments", "chaosbound");
  std::string config_path;
  RunOptions options;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "random seed, overrides the config");
  app.add_option("--threads", options.threads, "worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }
  options.out_dir = out_dir;
  if (seed_opt->count() > 0) options.seed = seed;
  try {
    const std::filesystem::path path(config_path);
    const ExperimentConfig config = parse_config(read_json_file(path), path.parent_path());
    run(config, options, out);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace chaosbound
