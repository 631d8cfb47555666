#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "maobo/config.hpp"
#include "maobo/gp.hpp"
#include "maobo/similarity.hpp"

namespace maobo {

/// The built-in pair list of the metric study.
std::vector<StudyPair> default_study_pairs();

struct StudyFit {
  std::string function;  // BenchmarkFn::id()
  Box box;
  std::uint64_t seed = 0;
  gp::KernelSpec kernel;
  double y_offset = 0.0;
  double y_scale = 1.0;
};

struct StudyPairResult {
  StudyPair pair;
  std::vector<std::uint64_t> seeds;
  std::vector<similarity::SimilarityReport> reports;  // one per seed
  double mean = 0.0;
  double sd = 0.0;
};

struct StudyResult {
  StudyConfig config;
  similarity::SimilarityConfig similarity;
  gp::KernelFamily kernel = gp::KernelFamily::Matern52;
  std::vector<StudyPairResult> pairs;
  std::vector<StudyFit> fits;  // unique (function, box, seed) fits, in first-use order
};

/// Training inputs shared by every function studied on `box` with `seed`.
Eigen::MatrixXd study_design(const Box& box, std::size_t samples, std::uint64_t seed);
/// Probe grid shared by both members of a pair.
Eigen::MatrixXd study_grid(const Box& box, std::size_t grid_per_dim, std::uint64_t seed);

/// Noiseless samples, one MAP GP per (function, box, seed), distances
/// averaged over seeds. Uses default_study_pairs() when config.pairs is empty.
StudyResult run_similarity_study(const StudyConfig& config, const similarity::SimilarityConfig& similarity,
                                 gp::KernelFamily kernel = gp::KernelFamily::Matern52);

nlohmann::json study_to_json(const StudyResult& result);
std::string study_pairs_csv(const StudyResult& result);

/// similarity.json and pairs.csv inside `dir`.
void write_study(const StudyResult& result, const std::filesystem::path& dir);

}  // namespace maobo
