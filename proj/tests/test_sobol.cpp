#include "doctest.h"

#include <algorithm>
#include <vector>

#include "maobo/errors.hpp"
#include "maobo/sobol.hpp"

using maobo::Box;
using maobo::SobolSequence;

TEST_CASE("unscrambled sobol matches the reference sequence") {
  // First points of the Joe-Kuo sequence in two dimensions.
  const double expected[8][2] = {{0.0, 0.0},     {0.5, 0.5},     {0.75, 0.25},  {0.25, 0.75},
                                 {0.375, 0.375}, {0.875, 0.875}, {0.625, 0.125}, {0.125, 0.625}};
  SobolSequence seq(2);
  for (const auto& row : expected) {
    const Eigen::VectorXd p = seq.next();
    CHECK(p[0] == row[0]);
    CHECK(p[1] == row[1]);
  }
}

TEST_CASE("third coordinate follows the second direction polynomial") {
  SobolSequence seq(3);
  const double third[4] = {0.0, 0.5, 0.25, 0.75};
  for (double v : third) CHECK(seq.next()[2] == v);
}

TEST_CASE("each power of two prefix stratifies every coordinate") {
  for (std::uint64_t seed : {0ull, 7ull, 123456789ull}) {
    SobolSequence seq(4, seed);
    const Eigen::MatrixXd pts = seq.take(64);
    for (Eigen::Index j = 0; j < pts.cols(); ++j) {
      std::vector<int> bins(64, 0);
      for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        CHECK(pts(i, j) >= 0.0);
        CHECK(pts(i, j) < 1.0);
        ++bins[static_cast<std::size_t>(pts(i, j) * 64.0)];
      }
      CHECK(std::all_of(bins.begin(), bins.end(), [](int c) { return c == 1; }));
    }
  }
}

TEST_CASE("scrambling is seeded") {
  const Eigen::MatrixXd a = SobolSequence(2, 5).take(16);
  const Eigen::MatrixXd b = SobolSequence(2, 5).take(16);
  const Eigen::MatrixXd c = SobolSequence(2, 6).take(16);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("sobol_in_box stays inside the box") {
  const Box box(Eigen::Vector2d(-5.0, 0.0), Eigen::Vector2d(10.0, 15.0));
  const Eigen::MatrixXd pts = maobo::sobol_in_box(box, 100, 42);
  REQUIRE(pts.rows() == 100);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) CHECK(box.contains(pts.row(i).transpose()));
}

TEST_CASE("dimension limits") {
  CHECK_THROWS_AS(SobolSequence(0), maobo::UnsupportedDimension);
  CHECK_THROWS_AS(SobolSequence(SobolSequence::kMaxDim + 1), maobo::UnsupportedDimension);
}
