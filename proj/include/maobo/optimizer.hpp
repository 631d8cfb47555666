#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "maobo/benchmarks.hpp"
#include "maobo/gp.hpp"
#include "maobo/pareto.hpp"
#include "maobo/random.hpp"
#include "maobo/similarity.hpp"

namespace maobo {

struct AcquisitionOptions {
  std::size_t candidates = 1000;  // G
  std::size_t samples = 32;       // S
  bool operator==(const AcquisitionOptions&) const = default;
};

struct RunConfig {
  bench::ProblemSpec problem;
  std::size_t iterations = 25;  // T, total evaluation budget including the initial design
  std::size_t n_init = 5;
  std::size_t delta_start = 10;  // first iteration at which reduction is attempted
  double epsilon = 0.1;          // reduction threshold on the similarity distance
  bool reduction = true;
  similarity::SimilarityConfig similarity;
  std::optional<Eigen::VectorXd> reference;
  std::uint64_t seed = 1;
  AcquisitionOptions acquisition;
  gp::KernelFamily kernel = gp::KernelFamily::Matern52;
  bool proxy_removed = true;  // removed objectives enter the acquisition through their kept twin
  std::size_t restarts = 5;
  std::size_t grid_per_dim = 500;

  void validate() const;
  bool operator==(const RunConfig& other) const;
};

/// Observed inputs and noisy evaluations; NaN marks an objective that was not
/// evaluated at that row (removed earlier in the run).
struct Dataset {
  Eigen::MatrixXd x;  // n x d
  Eigen::MatrixXd y;  // n x k_full

  std::size_t size() const { return static_cast<std::size_t>(x.rows()); }
  void append(const Eigen::VectorXd& xi, const Eigen::VectorXd& yi);
};

struct Removal {
  std::size_t iteration = 0;
  std::size_t removed = 0;  // original objective index
  std::size_t kept = 0;
  double distance = 0.0;
  double slope = 1.0;  // affine map from the kept objective's mean onto the removed one's
  double intercept = 0.0;
};

struct PairDistance {
  std::size_t i = 0;  // original objective indices, i before j in active order
  std::size_t j = 0;
  similarity::SimilarityReport report;
};

struct ModelRecord {
  std::size_t objective = 0;
  gp::KernelSpec kernel;
  double y_offset = 0.0;
  double y_scale = 1.0;
};

struct AcquisitionChoice {
  std::size_t index = 0;  // candidate row, meaningless when fallback is set
  double value = 0.0;     // estimated expected improvement
  bool fallback = false;  // every candidate had zero estimated improvement
  Eigen::VectorXd weights;
};

struct IterationRecord {
  std::size_t iteration = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd y;                    // NaN for objectives not evaluated
  std::vector<std::size_t> evaluated;   // active set when the point was evaluated
  std::vector<ModelRecord> models;      // fitted at the start of the iteration
  AcquisitionChoice acquisition;
  std::vector<PairDistance> distances;  // empty unless reduction was attempted
  std::optional<Removal> removal;
};

/// Live optimization state. `models` are aligned with `active`.
struct OptState {
  Dataset data;
  std::vector<std::size_t> active;
  std::size_t iteration = 0;  // evaluations performed so far
  std::vector<gp::GpModel> models;
  std::vector<Removal> reductions;
};

struct Recommendation {
  std::vector<std::size_t> indices;  // rows of the dataset on the observed front
  pareto::ParetoFront front;         // noiseless values of all original objectives
  double hypervolume = 0.0;
};

struct RunResult {
  RunConfig config;
  Dataset data;
  Eigen::VectorXd noise_sd;
  std::vector<IterationRecord> trace;
  std::vector<Removal> reductions;
  std::vector<std::size_t> final_active;
  std::vector<std::size_t> evaluations;  // per original objective
  Recommendation recommendation;
};

/// Seeded low-discrepancy initial design with additive Gaussian noise.
/// Writes the per-objective noise standard deviation into `noise_sd`.
Dataset initial_design(const RunConfig& config, const bench::Problem& problem, Eigen::VectorXd& noise_sd);

/// Augmented Chebyshev scalarization of normalized objective values.
double scalarize_chebyshev(const Eigen::VectorXd& normalized, const Eigen::VectorXd& weights,
                           double augmentation = 0.05);

/// Uniform draw from the probability simplex of dimension k.
Eigen::VectorXd sample_simplex(std::size_t k, Rng& rng);

/// Monte Carlo expected improvement of the scalarized objective over a
/// candidate set. `mean`/`variance` are G x k predictions, `observed` is the
/// n x k block of observations for the same objectives.
AcquisitionChoice choose_candidate(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& variance,
                                   const Eigen::MatrixXd& observed, const Eigen::VectorXd& weights,
                                   std::size_t samples, Rng& rng);

/// Same, with the standard-normal draws supplied as an S x k matrix shared by
/// every candidate (common random numbers keep the estimate smooth across
/// candidates, so the argmax does not flip on sampling noise).
AcquisitionChoice choose_candidate(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& variance,
                                   const Eigen::MatrixXd& observed, const Eigen::VectorXd& weights,
                                   const Eigen::MatrixXd& normals);

/// Fits one MAP GP per active objective on the current data.
std::vector<gp::GpModel> fit_models(const OptState& state, const RunConfig& config);

/// Objective reached by following removals from `objective` to an active
/// one, with the composed affine map: f_objective ~ slope * f_root + intercept.
struct AffineLink {
  std::size_t root = 0;
  double slope = 1.0;
  double intercept = 0.0;
};
AffineLink resolve_removed(const std::vector<Removal>& reductions, std::size_t objective);

/// Next input to evaluate. `models` must be fitted for all active objectives.
/// Weights and normal draws are generated for every original objective, so
/// runs that differ only in removals consume identical random streams.
/// With proxy_removed, a removed objective is scalarized as the affine image
/// of its kept twin (prediction, sample and observed values; nothing is
/// evaluated). Otherwise weights are restricted to the active objectives and
/// renormalized, which is again uniform on the smaller simplex.
Eigen::VectorXd propose_next(const OptState& state, const RunConfig& config, const Box& box,
                             AcquisitionChoice* choice = nullptr);

/// Similarity-driven reduction over the active models: the first pair (i, j),
/// i before j in active order, with distance below epsilon removes objective
/// j. At most one removal per call. All pair distances are written to
/// `distances` when given.
std::optional<Removal> reduce_objectives(OptState& state, const RunConfig& config,
                                         const std::shared_ptr<const Eigen::MatrixXd>& grid,
                                         std::vector<PairDistance>* distances = nullptr);

/// Component-wise max plus 10% of the range (1 where the range is zero).
Eigen::VectorXd default_reference(const Eigen::MatrixXd& values);

/// Observed front over the active objectives, re-evaluated noiselessly on all
/// objectives. Uses `reference` when given, otherwise the default reference
/// over the noiseless values of every observed input.
Recommendation recommend(const OptState& state, const bench::Problem& problem,
                         const std::optional<Eigen::VectorXd>& reference);

/// Step-wise driver for one optimization run.
class ManyObjectiveOptimizer {
 public:
  explicit ManyObjectiveOptimizer(RunConfig config);

  const RunConfig& config() const { return config_; }
  const bench::Problem& problem() const { return problem_; }
  const OptState& state() const { return state_; }
  const std::shared_ptr<const Eigen::MatrixXd>& probe_grid() const { return grid_; }
  bool done() const { return state_.iteration >= config_.iterations; }

  /// Performs one iteration (fit, propose, evaluate, maybe reduce).
  const IterationRecord& step();
  RunResult finish() const;

 private:
  RunConfig config_;
  bench::Problem problem_;
  OptState state_;
  Eigen::VectorXd noise_sd_;
  std::shared_ptr<const Eigen::MatrixXd> grid_;
  std::vector<IterationRecord> trace_;
  std::vector<std::size_t> evaluations_;
};

RunResult run(const RunConfig& config);

}  // namespace maobo
