#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "maobo/box.hpp"

namespace maobo {

/// Sobol' low-discrepancy sequence (Joe-Kuo direction numbers, 32-bit Gray
/// code construction) with an optional random digital shift. A digital shift
/// keeps the net structure of the sequence, so every power-of-two prefix still
/// stratifies each coordinate.
class SobolSequence {
 public:
  static constexpr std::size_t kMaxDim = 10;
  static constexpr int kBits = 32;

  /// `scramble_seed == 0` yields the classical unscrambled sequence whose
  /// first point is the origin.
  explicit SobolSequence(std::size_t dim, std::uint64_t scramble_seed = 0);

  std::size_t dim() const { return dim_; }

  /// Next point in [0,1)^dim.
  Eigen::VectorXd next();

  /// The next `n` points as rows of an n x dim matrix.
  Eigen::MatrixXd take(std::size_t n);

 private:
  std::size_t dim_;
  std::uint64_t index_ = 0;
  std::vector<std::array<std::uint32_t, kBits>> directions_;
  std::vector<std::uint32_t> state_;
  std::vector<std::uint32_t> shift_;
};

/// `n` scrambled Sobol' points mapped into `box`.
Eigen::MatrixXd sobol_in_box(const Box& box, std::size_t n, std::uint64_t seed);

}  // namespace maobo
