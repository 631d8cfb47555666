#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "maobo/config.hpp"
#include "maobo/optimizer.hpp"

namespace maobo {

struct CellSpec {
  bool baseline = false;
  std::size_t delta_start = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;

  /// Directory name, e.g. "baseline-seed1" or "d10-e0.05-seed1".
  std::string id() const;
};

struct CellResult {
  CellSpec spec;
  bool ok = false;
  std::string error;
  std::optional<RunResult> result;
  double relative_gap = 0.0;  // NaN when no baseline is available
};

struct ExperimentReport {
  std::vector<CellResult> cells;
  Eigen::VectorXd reference;

  bool all_ok() const;
};

/// Baseline cells (one per seed, when enabled) followed by the
/// delta_start x epsilon x seed grid, in that nesting order. With [run]
/// reduction disabled only the baseline cells remain.
std::vector<CellSpec> sweep_cells(const ExperimentConfig& config);

RunConfig cell_run_config(const ExperimentConfig& config, const CellSpec& cell);

/// Worker count for `cells` cells: MAOBO_THREADS when set, else hardware
/// concurrency, never more than the cell count.
std::size_t pool_size(std::size_t cells);

/// Runs every cell and recomputes hypervolumes against a reference shared by
/// all cells (the configured one, else the default over every observed input
/// of every cell). A failing cell is recorded, the others proceed.
ExperimentReport execute_sweep(const ExperimentConfig& config);

std::string table_csv(const ExperimentReport& report);

/// execute_sweep plus per-cell artifacts in `out/<cell id>/` and `out/table.csv`.
ExperimentReport run_sweep(const ExperimentConfig& config, const std::filesystem::path& out);

/// One run with the [run] settings; artifacts go straight into `out`.
RunResult run_single(const ExperimentConfig& config, const std::filesystem::path& out);

}  // namespace maobo
