#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "chaosbound/bounds.hpp"
#include "chaosbound/pearson.hpp"
#include "chaosbound/simulate.hpp"
#include "chaosbound/sym_kernel.hpp"

namespace chaosbound {

using Json = nlohmann::ordered_json;

/// Shortest round-trip-safe text with 17 significant digits; "inf", "-inf", "nan".
std::string format_real(double x);

/// {dim, order, entries: [[[i_1, ..., i_q], value], ...], gram: [[...], ...]}.
/// Each entry gives the full-tensor value at one ordering of its multi-index;
/// only nonzero entries are written, one per multiset. gram defaults to the
/// identity when absent.
Json kernel_to_json(const SymKernel& f);
/// When `space` is given the kernel is placed on it and any gram in the
/// document must match it.
SymKernel kernel_from_json(const Json& j, const SpacePtr& space = nullptr);

/// {constant, terms: [{order, kernel}]}; all terms share one space.
Json chaos_to_json(const ChaosVector& F);
ChaosVector chaos_from_json(const Json& j);

Json report_to_json(const BoundReport& report);

/// {alpha, beta, gamma, a, b}; infinite endpoints are the strings "-inf" and "inf".
Json pearson_to_json(const PearsonSpec& spec);
PearsonSpec pearson_from_json(const Json& j);

/// Throws IoError when the file cannot be read and ParseError on malformed JSON.
Json read_json_file(const std::filesystem::path& path);
/// Creates parent directories; throws IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Comma-separated table with a fixed column order.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  /// Lines written before the header, each prefixed with "# ".
  void add_comment(const std::string& line);
  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> comments_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Columns metric, variance_term, squared_total, bound.
std::vector<std::string> report_csv_header();
std::vector<std::string> report_csv_cells(const BoundReport& report);

/// One value per line under a "value" header, preceded by the generator meta.
CsvTable batch_to_csv(const SampleBatch& batch);

}  // namespace chaosbound
