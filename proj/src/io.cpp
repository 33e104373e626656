#include "chaosbound/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "chaosbound/error.hpp"

namespace chaosbound {

namespace {

const Json& field(const Json& j, const char* key, const char* where) {
  if (!j.is_object()) throw ParseError(std::string(where) + ": expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string(where) + ": missing field '" + key + "'");
  return *it;
}

int integer_field(const Json& j, const char* key, const char* where) {
  const Json& v = field(j, key, where);
  if (!v.is_number_integer()) throw ParseError(std::string(where) + ": field '" + key + "' must be an integer");
  return v.get<int>();
}

double real_value(const Json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf" || s == "−inf") return -kInf;
  }
  throw ParseError(what + " must be a number");
}

Json real_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

SpacePtr space_from_json(const Json& j, int dim, const char* where) {
  const auto it = j.find("gram");
  if (it == j.end() || it->is_null()) return GramSpace::identity(dim);
  if (!it->is_array() || static_cast<int>(it->size()) != dim)
    throw ParseError(std::string(where) + ": gram must be a dim x dim array");
  Eigen::MatrixXd G(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const Json& row = (*it)[r];
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw ParseError(std::string(where) + ": gram must be a dim x dim array");
    for (int c = 0; c < dim; ++c) G(r, c) = real_value(row[c], std::string(where) + ": gram entry");
  }
  return GramSpace::make(G);
}

Json gram_json(const GramSpace& space) {
  Json rows = Json::array();
  for (int r = 0; r < space.dim(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < space.dim(); ++c) row.push_back(space.gram()(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string escape_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

Json kernel_to_json(const SymKernel& f) {
  Json entries = Json::array();
  f.for_each([&](std::span<const int> m, double c) {
    if (c == 0.0) return;
    entries.push_back(Json::array({Json(std::vector<int>(m.begin(), m.end())), c / ordering_count(m)}));
  });
  Json j;
  j["dim"] = f.dim();
  j["order"] = f.order();
  j["entries"] = std::move(entries);
  j["gram"] = gram_json(*f.space());
  return j;
}

SymKernel kernel_from_json(const Json& j, const SpacePtr& space) {
  constexpr const char* where = "kernel";
  const int dim = integer_field(j, "dim", where);
  const int order = integer_field(j, "order", where);
  if (dim < 1) throw ParseError("kernel: dim must be >= 1");
  if (order < 0) throw ParseError("kernel: order must be >= 0");
  SpacePtr s = space_from_json(j, dim, where);
  if (space) {
    if (space->dim() != dim) throw SpaceMismatch("kernel: dimension differs from the expected space");
    if (j.contains("gram") && !(*space == *s)) throw SpaceMismatch("kernel: gram differs from the expected space");
    s = space;
  }
  SymKernel f(s, order);
  const Json& entries = field(j, "entries", where);
  if (!entries.is_array()) throw ParseError("kernel: entries must be an array");
  std::set<std::vector<int>> seen;
  for (const Json& e : entries) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_array())
      throw ParseError("kernel: each entry must be [[indices...], value]");
    std::vector<int> m;
    for (const Json& i : e[0]) {
      if (!i.is_number_integer()) throw ParseError("kernel: indices must be integers");
      m.push_back(i.get<int>());
    }
    if (static_cast<int>(m.size()) != order) throw ParseError("kernel: entry has the wrong number of indices");
    for (int i : m)
      if (i < 0 || i >= dim) throw ParseError("kernel: index out of range");
    std::sort(m.begin(), m.end());
    if (!seen.insert(m).second) throw ParseError("kernel: repeated multi-index " + fmt::format("{}", fmt::join(m, ",")));
    const double value = real_value(e[1], "kernel: entry value");
    if (!std::isfinite(value)) throw ParseError("kernel: entry values must be finite");
    f.set_coefficient(m, value * ordering_count(m));
  }
  return f;
}

Json chaos_to_json(const ChaosVector& F) {
  Json terms = Json::array();
  for (const SymKernel& f : F.terms()) {
    Json t;
    t["order"] = f.order();
    t["kernel"] = kernel_to_json(f);
    terms.push_back(std::move(t));
  }
  Json j;
  j["constant"] = F.constant();
  j["terms"] = std::move(terms);
  j["dim"] = F.space()->dim();
  j["gram"] = gram_json(*F.space());
  return j;
}

ChaosVector chaos_from_json(const Json& j) {
  constexpr const char* where = "chaos";
  const Json& constant = field(j, "constant", where);
  if (!constant.is_number()) throw ParseError("chaos: constant must be a number");
  const Json& terms = field(j, "terms", where);
  if (!terms.is_array()) throw ParseError("chaos: terms must be an array");
  SpacePtr space;
  if (j.contains("dim")) {
    space = space_from_json(j, integer_field(j, "dim", where), where);
  } else if (!terms.empty()) {
    const Json& k = field(terms[0], "kernel", where);
    space = space_from_json(k, integer_field(k, "dim", where), where);
  } else {
    space = GramSpace::identity(1);
  }
  ChaosVector F(space, constant.get<double>());
  std::set<int> orders;
  for (const Json& t : terms) {
    const int order = integer_field(t, "order", where);
    const SymKernel f = kernel_from_json(field(t, "kernel", where), space);
    if (f.order() != order) throw ParseError("chaos: term order differs from its kernel order");
    if (!orders.insert(order).second) throw ParseError("chaos: repeated order " + std::to_string(order));
    F.add(f);
  }
  return F;
}

Json report_to_json(const BoundReport& report) {
  Json terms = Json::array();
  for (const auto& t : report.contraction_terms) terms.push_back({{"r", t.r}, {"i", t.i}, {"j", t.j}, {"value", t.value}});
  Json j;
  j["metric"] = to_string(report.metric);
  j["variance_term"] = report.variance_term;
  j["contraction_terms"] = std::move(terms);
  j["squared_total"] = report.squared_total;
  j["metric_constant"] = report.metric_constant;
  j["bound"] = report.bound;
  j["unsymmetrized_squared_total"] =
      report.unsymmetrized_squared_total ? Json(*report.unsymmetrized_squared_total) : Json(nullptr);
  j["symmetrized_squared_total"] =
      report.symmetrized_squared_total ? Json(*report.symmetrized_squared_total) : Json(nullptr);
  return j;
}

Json pearson_to_json(const PearsonSpec& spec) {
  Json j;
  j["alpha"] = spec.alpha;
  j["beta"] = spec.beta;
  j["gamma"] = spec.gamma;
  j["a"] = real_json(spec.a);
  j["b"] = real_json(spec.b);
  return j;
}

PearsonSpec pearson_from_json(const Json& j) {
  constexpr const char* where = "pearson";
  PearsonSpec s;
  s.alpha = real_value(field(j, "alpha", where), "pearson: alpha");
  s.beta = real_value(field(j, "beta", where), "pearson: beta");
  s.gamma = real_value(field(j, "gamma", where), "pearson: gamma");
  s.a = j.contains("a") ? real_value(j["a"], "pearson: a") : -kInf;
  s.b = j.contains("b") ? real_value(j["b"], "pearson: b") : kInf;
  if (!std::isfinite(s.alpha) || !std::isfinite(s.beta) || !std::isfinite(s.gamma))
    throw ParseError("pearson: coefficients must be finite");
  return s;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  try {
    return Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw IoError("cannot write " + path.string());
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_comment(const std::string& line) { comments_.push_back(line); }

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw InvalidArgument("CsvTable: row width differs from the header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  for (const auto& c : comments_) out += "# " + c + "\n";
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += escape_cell(cells[i]);
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::vector<std::string> report_csv_header() { return {"metric", "variance_term", "squared_total", "bound"}; }

std::vector<std::string> report_csv_cells(const BoundReport& report) {
  return {to_string(report.metric), format_real(report.variance_term), format_real(report.squared_total),
          format_real(report.bound)};
}

CsvTable batch_to_csv(const SampleBatch& batch) {
  CsvTable t({"value"});
  t.add_comment("seed " + std::to_string(batch.seed));
  t.add_comment(batch.meta);
  for (double v : batch.values) t.add_row({format_real(v)});
  return t;
}

}  // namespace chaosbound
