#include "doctest.h"

#include <algorithm>
#include <random>

#include "maobo/errors.hpp"
#include "maobo/pareto.hpp"
#include "maobo/random.hpp"

using namespace maobo;
using namespace maobo::pareto;

namespace {

std::vector<std::size_t> scan_front(const Eigen::MatrixXd& y) {
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    bool dominated = false;
    for (Eigen::Index j = 0; j < y.rows() && !dominated; ++j) {
      if (i == j) continue;
      bool no_worse = true, better = false;
      for (Eigen::Index c = 0; c < y.cols(); ++c) {
        no_worse = no_worse && y(j, c) <= y(i, c);
        better = better || y(j, c) < y(i, c);
      }
      dominated = no_worse && better;
    }
    if (!dominated) out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

Eigen::MatrixXd random_front(Rng& rng, Eigen::Index n, Eigen::Index k) {
  // points on a concave shell are mutually non-dominated
  std::normal_distribution<double> normal;
  Eigen::MatrixXd p(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd d = Eigen::VectorXd::NullaryExpr(k, [&] { return std::abs(normal(rng)); });
    p.row(i) = (Eigen::VectorXd::Ones(k) - d / d.norm()).transpose();
  }
  return p;
}

}  // namespace

TEST_CASE("dominance hand cases") {
  CHECK(dominates(Eigen::Vector2d(1, 2), Eigen::Vector2d(2, 3)));
  CHECK_FALSE(dominates(Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 2)));
  CHECK_FALSE(dominates(Eigen::Vector2d(1, 3), Eigen::Vector2d(2, 2)));
}

TEST_CASE("dominance is irreflexive and transitive") {
  Rng rng(1);
  std::uniform_int_distribution<int> coin(0, 3);
  for (int rep = 0; rep < 2000; ++rep) {
    Eigen::Vector3d a, b, c;
    for (int i = 0; i < 3; ++i) {
      a[i] = coin(rng);
      b[i] = coin(rng);
      c[i] = coin(rng);
    }
    CHECK_FALSE(dominates(a, a));
    if (dominates(a, b) && dominates(b, c)) CHECK(dominates(a, c));
  }
}

TEST_CASE("front hand cases") {
  Eigen::MatrixXd y(3, 2);
  y << 1, 2, 2, 1, 3, 3;
  CHECK(pareto_front(y) == std::vector<std::size_t>{0, 1});
  CHECK(pareto_front(y.topRows(1)) == std::vector<std::size_t>{0});
  Eigen::MatrixXd dup(3, 2);
  dup << 1, 1, 1, 1, 2, 2;
  CHECK(pareto_front(dup) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("front matches the pairwise scan on 200 random instances") {
  Rng rng(2);
  std::uniform_int_distribution<int> size(1, 60), dims(2, 5), grid(0, 9);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index n = size(rng), k = dims(rng);
    // coarse integer values make ties and duplicates common
    const Eigen::MatrixXd y = Eigen::MatrixXd::NullaryExpr(n, k, [&] { return double(grid(rng)); });
    CHECK(pareto_front(y) == scan_front(y));
  }
}

TEST_CASE("hypervolume hand cases") {
  Eigen::MatrixXd f(2, 2);
  f << 1, 2, 2, 1;
  CHECK(hypervolume(f, Eigen::Vector2d(3, 3)) == 3.0);
  CHECK(hypervolume(Eigen::MatrixXd::Zero(1, 2), Eigen::Vector2d(1, 1)) == 1.0);
  CHECK(hypervolume(Eigen::MatrixXd(0, 2), Eigen::Vector2d(1, 1)) == 0.0);
  // points beyond the reference are dropped
  Eigen::MatrixXd g(2, 2);
  g << 0, 0, 5, -1;
  CHECK(hypervolume(g, Eigen::Vector2d(1, 1)) == 1.0);
  Eigen::MatrixXd c(1, 3);
  c << 0, 0, 0;
  CHECK(hypervolume(c, Eigen::Vector3d(1, 2, 3)) == doctest::Approx(6.0));
}

TEST_CASE("hypervolume rejects more than six objectives") {
  CHECK_THROWS_AS(hypervolume(Eigen::MatrixXd::Zero(2, 7), Eigen::VectorXd::Ones(7)), UnsupportedDimension);
  CHECK_THROWS_AS(hypervolume(Eigen::MatrixXd::Zero(2, 3), Eigen::VectorXd::Ones(2)), DimensionMismatch);
}

TEST_CASE("exact hypervolume within three standard errors of Monte Carlo") {
  Rng rng(3);
  for (Eigen::Index k : {2, 3, 4}) {
    for (int rep = 0; rep < 20; ++rep) {
      const Eigen::MatrixXd f = random_front(rng, 8, k);
      const Eigen::VectorXd ref = Eigen::VectorXd::Constant(k, 1.1);
      const double exact = hypervolume(f, ref);
      const auto mc = hypervolume_mc(f, ref, 1000000, 100 + static_cast<std::uint64_t>(rep));
      CHECK(std::abs(exact - mc.estimate) <= 3.0 * mc.standard_error + 1e-12);
    }
  }
}

TEST_CASE("monte carlo edge cases") {
  const auto unit = hypervolume_mc(Eigen::MatrixXd::Zero(1, 2), Eigen::Vector2d(1, 1), 100000, 1);
  CHECK(unit.estimate == 1.0);
  CHECK(unit.standard_error == 0.0);
  CHECK(hypervolume_mc(Eigen::MatrixXd(0, 2), Eigen::Vector2d(1, 1), 100, 1).estimate == 0.0);
}

TEST_CASE("hypervolume is monotone, order invariant and translation covariant") {
  Rng rng(4);
  for (int rep = 0; rep < 30; ++rep) {
    const Eigen::Index k = 2 + rep % 4;
    const Eigen::MatrixXd f = random_front(rng, 10, k);
    const Eigen::VectorXd ref = Eigen::VectorXd::Constant(k, 1.2);
    const double hv = hypervolume(f, ref);

    CHECK(hypervolume(f.topRows(9), ref) <= hv);

    Eigen::MatrixXd shuffled = f.colwise().reverse();
    Eigen::MatrixXd doubled(20, k);
    doubled << f, shuffled;
    CHECK(hypervolume(shuffled, ref) == doctest::Approx(hv).epsilon(1e-12));
    CHECK(hypervolume(doubled, ref) == doctest::Approx(hv).epsilon(1e-12));

    const Eigen::RowVectorXd shift = Eigen::RowVectorXd::LinSpaced(k, -3.0, 7.0);
    const Eigen::MatrixXd moved = f.rowwise() + shift;
    CHECK(std::abs(hypervolume(moved, ref + shift.transpose()) - hv) <= 1e-10 * hv);
  }
}

TEST_CASE("pareto front struct overload") {
  ParetoFront pf;
  pf.points.resize(2, 2);
  pf.points << 1, 2, 2, 1;
  pf.ref = Eigen::Vector2d(3, 3);
  CHECK(hypervolume(pf) == 3.0);
}
