#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "maobo/optimizer.hpp"

namespace maobo::io {

inline constexpr const char* kTraceSchema = "maobo.trace/1";
inline constexpr const char* kSummarySchema = "maobo.summary/1";

/// Writes `text` to a temporary sibling and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

nlohmann::json run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);

nlohmann::json trace_to_json(const RunResult& result);
nlohmann::json summary_to_json(const RunResult& result);
std::string front_csv(const RunResult& result);
std::string reductions_csv(const RunResult& result);

/// trace.json, front.csv, reductions.csv and summary.json inside `dir`.
void write_run_artifacts(const RunResult& result, const std::filesystem::path& dir);

/// Subset of a stored trace needed to rebuild the run's models.
struct StoredRun {
  RunConfig config;
  Dataset data;
  std::vector<IterationRecord> iterations;  // x, y, evaluated, models, removal
  Eigen::VectorXd reference;
};

/// Throws IoError naming the file when it is missing or malformed.
StoredRun read_trace(const std::filesystem::path& path);

}  // namespace maobo::io
