#pragma once

#include <string>

#include <Eigen/Core>

#include "maobo/gp.hpp"

namespace maobo::similarity {

enum class MeanDistanceMode {
  AvgRelativeDistance,  // mean |t - g| over exceeding entries, over the combined range
  PNorm,                // (sum over exceeding entries |t - g|^p)^(1/p); p = inf gives the max
  CountExceeding,       // number of entries with |t - g| > delta_tol
  FractionExceeding,    // that count divided by m
};

enum class CovDistanceMode { FrobeniusEntrywise, None };

std::string to_string(MeanDistanceMode mode);
std::string to_string(CovDistanceMode mode);
MeanDistanceMode mean_mode_from_string(const std::string& name);
CovDistanceMode cov_mode_from_string(const std::string& name);

struct SimilarityConfig {
  double eps1 = 0.25;
  double eps2 = 0.0;
  MeanDistanceMode d1_mode = MeanDistanceMode::AvgRelativeDistance;
  double p = 2.0;  // PNorm order; std::numeric_limits<double>::infinity() allowed
  double delta_tol = 0.0;
  CovDistanceMode d2_mode = CovDistanceMode::FrobeniusEntrywise;

  void validate() const;
  bool operator==(const SimilarityConfig&) const = default;
};

/// Least-squares map T(v) = a v + b fitting one mean vector onto another.
struct AffineFit {
  double a = 1.0;
  double b = 0.0;
  bool clamped = false;     // unconstrained slope was <= 0
  bool degenerate = false;  // source vector had zero variance
};

struct PearsonResult {
  double rho = 0.0;
  bool degenerate = false;
};

struct SimilarityReport {
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  double total = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  AffineFit affine;
  double rho = 0.0;
  bool rho_degenerate = false;
};

inline constexpr double kMinSlope = 1e-8;
inline constexpr double kMinStdDev = 1e-12;

AffineFit fit_affine(const Eigen::VectorXd& source, const Eigen::VectorXd& target);

/// `t` is the transformed source T(mu_f), `g` the target mean mu_g.
double mean_distance_d1(const Eigen::VectorXd& t, const Eigen::VectorXd& g, const SimilarityConfig& cfg);

PearsonResult pearson(const Eigen::VectorXd& f, const Eigen::VectorXd& g);

double cov_distance_d2(const Eigen::VectorXd& v_f, const Eigen::VectorXd& v_g, const SimilarityConfig& cfg);

/// Weighted-sum distance from `f` to `g`. Asymmetric: T fits f onto g.
/// Both summaries must share the same probe grid.
SimilarityReport gp_distance(const gp::PredictiveSummary& f, const gp::PredictiveSummary& g,
                             const SimilarityConfig& cfg);

/// Same as gp_distance on raw mean/variance vectors over a shared grid.
SimilarityReport gp_distance(const Eigen::VectorXd& mean_f, const Eigen::VectorXd& var_f,
                             const Eigen::VectorXd& mean_g, const Eigen::VectorXd& var_g,
                             const SimilarityConfig& cfg);

}  // namespace maobo::similarity
