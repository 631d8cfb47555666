#pragma once

#include <functional>
#include <optional>

#include <Eigen/Core>

namespace maobo {

/// Value and gradient of an objective at a point. `std::nullopt` marks a
/// point where the objective cannot be evaluated; the line search backs off.
struct ValueGradient {
  double value;
  Eigen::VectorXd gradient;
};
using Objective = std::function<std::optional<ValueGradient>(const Eigen::VectorXd&)>;

struct QuasiNewtonOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;  // on the projected gradient, infinity norm
  double value_tolerance = 1e-10;    // relative change between iterates
  double max_initial_step = 1.0;     // infinity-norm cap on the first trial step
};

struct QuasiNewtonResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Maximizes `objective` over the box [lower, upper] with BFGS on the free
/// variables. Iterates are clamped to the box; a variable sitting on a bound
/// whose gradient points outward is held fixed for that step.
/// Returns std::nullopt when the starting point cannot be evaluated.
std::optional<QuasiNewtonResult> maximize_in_box(const Objective& objective,
                                                 const Eigen::VectorXd& start,
                                                 const Eigen::VectorXd& lower,
                                                 const Eigen::VectorXd& upper,
                                                 const QuasiNewtonOptions& options = {});

}  // namespace maobo
