#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace maobo::pareto {

/// True iff `a` is no worse than `b` everywhere and strictly better somewhere
/// (minimization).
bool dominates(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);

/// Row indices of `y` (n x k) not dominated by any other row, ascending.
/// Duplicate rows do not dominate each other and are all retained.
std::vector<std::size_t> pareto_front(const Eigen::MatrixXd& y);

struct ParetoFront {
  Eigen::MatrixXd points;  // n x k objective vectors
  Eigen::MatrixXd inputs;  // n x d matching inputs (may be empty)
  Eigen::VectorXd ref;     // k reference point
};

inline constexpr std::size_t kMaxExactObjectives = 6;

/// Exact Lebesgue measure of the union of boxes [p_i, ref]. Points not
/// component-wise <= ref are dropped with a warning. Supports k <= 6.
double hypervolume(const Eigen::MatrixXd& points, const Eigen::VectorXd& ref);
double hypervolume(const ParetoFront& front);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Uniform-sampling estimate over the box [min(points), ref].
MonteCarloEstimate hypervolume_mc(const Eigen::MatrixXd& points, const Eigen::VectorXd& ref,
                                  std::size_t samples, std::uint64_t seed);

}  // namespace maobo::pareto
