#include "maobo/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maobo/errors.hpp"

namespace maobo::similarity {
namespace {

void require_same_length(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const char* op) {
  if (a.size() != b.size())
    throw DimensionMismatch(std::string(op) + ": vectors differ in length (" + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()) + ")");
}

double std_dev(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size()));
}

}  // namespace

std::string to_string(MeanDistanceMode mode) {
  switch (mode) {
    case MeanDistanceMode::AvgRelativeDistance:
      return "avg_relative";
    case MeanDistanceMode::PNorm:
      return "pnorm";
    case MeanDistanceMode::CountExceeding:
      return "count";
    case MeanDistanceMode::FractionExceeding:
      return "fraction";
  }
  return "unknown";
}

std::string to_string(CovDistanceMode mode) {
  return mode == CovDistanceMode::FrobeniusEntrywise ? "frobenius" : "none";
}

MeanDistanceMode mean_mode_from_string(const std::string& name) {
  if (name == "avg_relative") return MeanDistanceMode::AvgRelativeDistance;
  if (name == "pnorm") return MeanDistanceMode::PNorm;
  if (name == "count") return MeanDistanceMode::CountExceeding;
  if (name == "fraction") return MeanDistanceMode::FractionExceeding;
  throw InvalidInput("unknown mean distance mode '" + name + "'");
}

CovDistanceMode cov_mode_from_string(const std::string& name) {
  if (name == "frobenius") return CovDistanceMode::FrobeniusEntrywise;
  if (name == "none") return CovDistanceMode::None;
  throw InvalidInput("unknown covariance distance mode '" + name + "'");
}

void SimilarityConfig::validate() const {
  if (!(eps1 >= 0.0 && eps1 <= 1.0)) throw InvalidInput("eps1 must lie in [0,1]");
  if (!(eps2 >= 0.0 && eps2 <= 1.0)) throw InvalidInput("eps2 must lie in [0,1]");
  if (eps1 + eps2 > 1.0 + 1e-12) throw InvalidInput("eps1 + eps2 must not exceed 1");
  if (!(delta_tol >= 0.0)) throw InvalidInput("delta_tol must be non-negative");
  if (d1_mode == MeanDistanceMode::PNorm && !(p >= 1.0)) throw InvalidInput("p-norm order must be >= 1");
}

AffineFit fit_affine(const Eigen::VectorXd& source, const Eigen::VectorXd& target) {
  require_same_length(source, target, "fit_affine");
  if (source.size() < 2) throw InvalidInput("fit_affine needs at least two points");
  const double mf = source.mean();
  const double mg = target.mean();
  const Eigen::ArrayXd cf = source.array() - mf;
  const double sxx = cf.square().sum();

  AffineFit fit;
  if (std::sqrt(sxx / static_cast<double>(source.size())) < kMinStdDev) {
    fit.degenerate = true;
    fit.a = kMinSlope;
  } else {
    fit.a = (cf * (target.array() - mg)).sum() / sxx;
    if (fit.a <= 0.0) {
      fit.clamped = true;
      fit.a = kMinSlope;
    }
  }
  fit.b = mg - fit.a * mf;
  return fit;
}

double mean_distance_d1(const Eigen::VectorXd& t, const Eigen::VectorXd& g, const SimilarityConfig& cfg) {
  require_same_length(t, g, "mean_distance_d1");
  if (t.size() == 0) return 0.0;
  const Eigen::ArrayXd diff = (t - g).array().abs();
  const Eigen::ArrayXd kept = (diff > cfg.delta_tol).select(diff, 0.0);
  const double m = static_cast<double>(t.size());

  switch (cfg.d1_mode) {
    case MeanDistanceMode::AvgRelativeDistance: {
      const double hi = std::max(t.maxCoeff(), g.maxCoeff());
      const double lo = std::min(t.minCoeff(), g.minCoeff());
      const double range = hi - lo;
      if (!(range > 0.0)) return 0.0;
      return kept.sum() / m / range;
    }
    case MeanDistanceMode::PNorm:
      if (std::isinf(cfg.p)) return kept.maxCoeff();
      return std::pow(kept.pow(cfg.p).sum(), 1.0 / cfg.p);
    case MeanDistanceMode::CountExceeding:
      return static_cast<double>((diff > cfg.delta_tol).count());
    case MeanDistanceMode::FractionExceeding:
      return static_cast<double>((diff > cfg.delta_tol).count()) / m;
  }
  return 0.0;
}

PearsonResult pearson(const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
  require_same_length(f, g, "pearson");
  if (f.size() < 2) throw InvalidInput("pearson needs at least two points");
  const double sf = std_dev(f);
  const double sg = std_dev(g);
  if (sf < kMinStdDev || sg < kMinStdDev) return {0.0, true};
  const double cov = ((f.array() - f.mean()) * (g.array() - g.mean())).mean();
  return {std::clamp(cov / (sf * sg), -1.0, 1.0), false};
}

double cov_distance_d2(const Eigen::VectorXd& v_f, const Eigen::VectorXd& v_g, const SimilarityConfig& cfg) {
  require_same_length(v_f, v_g, "cov_distance_d2");
  if (cfg.d2_mode == CovDistanceMode::None || v_f.size() == 0) return 0.0;
  return (v_f - v_g).norm() / static_cast<double>(v_f.size());
}

SimilarityReport gp_distance(const Eigen::VectorXd& mean_f, const Eigen::VectorXd& var_f,
                             const Eigen::VectorXd& mean_g, const Eigen::VectorXd& var_g,
                             const SimilarityConfig& cfg) {
  cfg.validate();
  require_same_length(mean_f, mean_g, "gp_distance");
  require_same_length(var_f, mean_f, "gp_distance");
  require_same_length(var_g, mean_g, "gp_distance");

  SimilarityReport r;
  r.affine = fit_affine(mean_f, mean_g);
  const Eigen::VectorXd t = (mean_f.array() * r.affine.a + r.affine.b).matrix();
  r.d1 = mean_distance_d1(t, mean_g, cfg);
  r.d2 = cov_distance_d2(var_f, var_g, cfg);
  const auto pr = pearson(mean_f, mean_g);
  r.rho = pr.rho;
  r.rho_degenerate = pr.degenerate;
  r.s1 = cfg.eps1 * r.d1;
  r.s2 = cfg.eps2 * r.d2;
  r.s3 = (1.0 - cfg.eps1 - cfg.eps2) * (1.0 - r.rho);
  r.total = r.s1 + r.s2 + r.s3;
  return r;
}

SimilarityReport gp_distance(const gp::PredictiveSummary& f, const gp::PredictiveSummary& g,
                             const SimilarityConfig& cfg) {
  if (!f.grid || !g.grid) throw InvalidInput("gp_distance: summaries carry no probe grid");
  if (f.grid != g.grid) {
    const bool same = f.grid->rows() == g.grid->rows() && f.grid->cols() == g.grid->cols() && *f.grid == *g.grid;
    if (!same) throw DimensionMismatch("gp_distance: summaries were computed on different probe grids");
  }
  return gp_distance(f.mean, f.variance, g.mean, g.variance, cfg);
}

}  // namespace maobo::similarity
