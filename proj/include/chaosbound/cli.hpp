#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "chaosbound/io.hpp"

namespace chaosbound {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitParse = 2,
  kExitPrecondition = 3,
  kExitIo = 4,
};

/// One flat JSON object: {"command": ..., command-specific keys}.
struct ExperimentConfig {
  std::string command;
  Json parameters;
  /// Relative kernel paths are resolved against this directory.
  std::filesystem::path base_dir;
};

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed;  // overrides the config
  int threads = 1;
};

/// Throws ParseError for an unknown command or a config that is not an object.
ExperimentConfig parse_config(const Json& j, std::filesystem::path base_dir = {});

/// Validates every parameter, runs the command and writes its CSV files plus
/// manifest.json into the output directory. Nothing is written when
/// validation or computation fails. Returns the paths written.
std::vector<std::filesystem::path> run(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);

/// Exit status for an exception escaping run().
int exit_code_for(const std::exception& e);

/// Command-line entry point: --config PATH, --out DIR, --seed U64, --threads N.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chaosbound
