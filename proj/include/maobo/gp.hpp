#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <Eigen/Core>

namespace maobo::gp {

enum class KernelFamily { SquaredExponential, Matern52 };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Stationary ARD kernel with an additive white-noise term on the diagonal.
struct KernelSpec {
  KernelFamily family = KernelFamily::Matern52;
  Eigen::VectorXd lengthscales;  // one per input dimension, all > 0
  double signal_variance = 1.0;  // > 0
  double noise_variance = 0.0;   // >= 0

  std::size_t dim() const { return static_cast<std::size_t>(lengthscales.size()); }

  /// Throws InvalidInput when an invariant fails, DimensionMismatch when
  /// `expected_dim` is non-zero and differs from the lengthscale count.
  void validate(std::size_t expected_dim = 0) const;

  /// Hyperparameters in log space: [log l_1 .. log l_d, log sf2, log sn2].
  Eigen::VectorXd log_params() const;
  static KernelSpec from_log_params(KernelFamily family, const Eigen::VectorXd& theta);
};

/// Covariance between `x` and `xp`; adds the noise variance iff `same_point`.
double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& xp, bool same_point);

/// Noise-free covariance between the rows of `a` and the rows of `b`.
Eigen::MatrixXd cross_covariance(const KernelSpec& spec, const Eigen::MatrixXd& a,
                                 const Eigen::MatrixXd& b);

/// Posterior mean and latent-function variance over a probe grid.
struct PredictiveSummary {
  std::shared_ptr<const Eigen::MatrixXd> grid;
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;

  std::size_t size() const { return static_cast<std::size_t>(mean.size()); }
};

struct FitOptions {
  int restarts = 5;
  std::uint64_t seed = 1;
  double lower_bound = 1e-3;  // on every raw hyperparameter
  double upper_bound = 1e3;
  int max_iterations = 200;
  bool standardize = true;
};

/// Exact zero-mean GP regression model with a cached Cholesky factor of
/// K + sn2 I. Immutable after construction.
///
/// Targets are stored internally as (y - y_offset) / y_scale; predictions are
/// reported on the original scale. `assemble` uses offset 0 and scale 1 unless
/// told otherwise, `fit_map` standardizes.
class GpModel {
 public:
  static GpModel assemble(Eigen::MatrixXd x, const Eigen::VectorXd& y, KernelSpec kernel,
                          double y_offset = 0.0, double y_scale = 1.0);

  const KernelSpec& kernel() const { return kernel_; }
  const Eigen::MatrixXd& train_x() const { return x_; }
  /// Internal (standardized) targets.
  const Eigen::VectorXd& train_y() const { return y_; }
  const Eigen::MatrixXd& chol() const { return chol_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double jitter() const { return jitter_; }
  double y_offset() const { return y_offset_; }
  double y_scale() const { return y_scale_; }
  std::size_t size() const { return static_cast<std::size_t>(x_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(x_.cols()); }

  PredictiveSummary predict(std::shared_ptr<const Eigen::MatrixXd> grid) const;
  PredictiveSummary predict(const Eigen::MatrixXd& grid) const;

  /// Log marginal likelihood of the internal targets.
  double log_marginal() const;
  /// Gradient of log_marginal with respect to log_params().
  Eigen::VectorXd log_marginal_grad() const;

 private:
  GpModel() = default;

  KernelSpec kernel_;
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
  double y_offset_ = 0.0;
  double y_scale_ = 1.0;
};

/// MAP (type-II maximum likelihood) fit with multi-start quasi-Newton ascent
/// in log-hyperparameter space.
GpModel fit_map(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, KernelFamily family,
                const FitOptions& options = {});

}  // namespace maobo::gp
