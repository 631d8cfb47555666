#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maobo/benchmarks.hpp"
#include "maobo/box.hpp"
#include "maobo/optimizer.hpp"

namespace maobo {

struct SweepConfig {
  std::vector<std::size_t> delta_start;  // defaults to [run] delta_start
  std::vector<double> epsilon;           // defaults to [run] epsilon
  std::vector<std::uint64_t> seeds;      // defaults to [run] seed
  bool baseline = true;                  // one reduction-free cell per seed
  std::string output = "maobo-out";

  bool operator==(const SweepConfig&) const = default;
};

struct StudyPair {
  bench::BenchmarkFn f;
  bench::BenchmarkFn g;
  Box box;

  bool operator==(const StudyPair&) const = default;
};

struct StudyConfig {
  std::size_t samples = 200;  // training points per function
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t grid_per_dim = 500;
  std::vector<StudyPair> pairs;  // empty: built-in pair list

  bool operator==(const StudyConfig&) const = default;
};

struct ExperimentConfig {
  RunConfig run;
  bool has_problem = false;
  std::optional<std::string> preset;  // problem came from a named preset
  SweepConfig sweep;
  StudyConfig study;

  /// Throws ConfigError when no [problem] section was given.
  void require_problem() const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the sectioned key = value grammar documented in docs/formats.md.
/// Errors are ConfigError carrying the line number and field name.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace maobo
