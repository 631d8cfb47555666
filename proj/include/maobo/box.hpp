#pragma once

#include <Eigen/Core>

#include "maobo/errors.hpp"

namespace maobo {

/// Axis-aligned input domain [lower, upper].
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Box() = default;
  Box(Eigen::VectorXd lo, Eigen::VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) throw DimensionMismatch("box bounds differ in length");
    for (Eigen::Index i = 0; i < lower.size(); ++i)
      if (!(lower[i] < upper[i])) throw InvalidInput("box lower bound must be below upper bound");
  }

  /// Hypercube [lo, hi]^dim.
  static Box cube(std::size_t dim, double lo, double hi) {
    return Box(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), lo),
               Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), hi));
  }

  std::size_t dim() const { return static_cast<std::size_t>(lower.size()); }
  Eigen::VectorXd width() const { return upper - lower; }

  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (x.size() != lower.size()) return false;
    return ((x.array() >= lower.array()) && (x.array() <= upper.array())).all();
  }

  /// Maps rows of `unit` (points in [0,1]^d) into the box.
  Eigen::MatrixXd scale(const Eigen::MatrixXd& unit) const {
    if (static_cast<std::size_t>(unit.cols()) != dim())
      throw DimensionMismatch("unit points do not match box dimension");
    Eigen::MatrixXd out = unit;
    const Eigen::VectorXd w = width();
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out.col(j) = (out.col(j).array() * w[j] + lower[j]).matrix();
    return out;
  }

  bool operator==(const Box& other) const {
    return lower.size() == other.lower.size() && lower == other.lower && upper == other.upper;
  }
};

}  // namespace maobo
