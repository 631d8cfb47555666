#include "maobo/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "maobo/errors.hpp"
#include "maobo/log.hpp"
#include "maobo/random.hpp"

namespace maobo::pareto {
namespace {

using Point = const double*;

bool weakly_dominates(Point a, Point b, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i)
    if (a[i] > b[i]) return false;
  return true;
}

// Hypervolume of `pts` restricted to the first k coordinates.
double sweep(std::vector<Point> pts, std::size_t k, const double* ref) {
  if (pts.empty()) return 0.0;
  if (k == 1) {
    double lo = ref[0];
    for (Point p : pts) lo = std::min(lo, p[0]);
    return ref[0] - lo;
  }
  if (k == 2) {
    std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]); });
    double area = 0.0;
    double best = ref[1];
    for (std::size_t i = 0; i < pts.size(); ++i) {
      best = std::min(best, pts[i][1]);
      const double next = i + 1 < pts.size() ? pts[i + 1][0] : ref[0];
      area += (next - pts[i][0]) * (ref[1] - best);
    }
    return area;
  }
  // Slice along the last objective; each slab is the (k-1)-dimensional volume
  // of the points already below it times the slab height.
  const std::size_t last = k - 1;
  std::sort(pts.begin(), pts.end(), [last](Point a, Point b) { return a[last] < b[last]; });
  double volume = 0.0;
  std::vector<Point> slab;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Point p = pts[i];
    const bool covered = std::any_of(slab.begin(), slab.end(), [&](Point q) { return weakly_dominates(q, p, last); });
    if (!covered) {
      slab.erase(std::remove_if(slab.begin(), slab.end(), [&](Point q) { return weakly_dominates(p, q, last); }),
                 slab.end());
      slab.push_back(p);
    }
    const double next = i + 1 < pts.size() ? pts[i + 1][last] : ref[last];
    const double height = next - p[last];
    if (height > 0.0) volume += height * sweep(slab, last, ref);
  }
  return volume;
}

}  // namespace

bool dominates(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size())
    throw DimensionMismatch("dominates: objective vectors differ in length (" + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()) + ")");
  bool strict = false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strict = true;
  }
  return strict;
}

std::vector<std::size_t> pareto_front(const Eigen::MatrixXd& y) {
  const auto n = static_cast<std::size_t>(y.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Lexicographic order: a dominating row always precedes the rows it
  // dominates, so each row only needs checking against the front so far.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
      if (y(a, c) < y(b, c)) return true;
      if (y(a, c) > y(b, c)) return false;
    }
    return a < b;
  });
  std::vector<std::size_t> front;
  for (std::size_t idx : order) {
    const bool dominated = std::any_of(front.begin(), front.end(), [&](std::size_t f) {
      return dominates(y.row(f).transpose(), y.row(idx).transpose());
    });
    if (!dominated) front.push_back(idx);
  }
  std::sort(front.begin(), front.end());
  return front;
}

double hypervolume(const Eigen::MatrixXd& points, const Eigen::VectorXd& ref) {
  const auto k = static_cast<std::size_t>(ref.size());
  if (k == 0) throw InvalidInput("hypervolume: empty reference point");
  if (points.rows() > 0 && static_cast<std::size_t>(points.cols()) != k)
    throw DimensionMismatch("hypervolume: points and reference point differ in dimension");
  if (k > kMaxExactObjectives)
    throw UnsupportedDimension("exact hypervolume supports at most " + std::to_string(kMaxExactObjectives) +
                               " objectives (got " + std::to_string(k) + "); use hypervolume_mc instead");
  if (!ref.allFinite()) throw InvalidInput("hypervolume: non-finite reference point");

  // Row-major copy so each point is contiguous.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = points;
  std::vector<Point> pts;
  std::size_t clipped = 0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    if (!rows.row(i).allFinite()) throw InvalidInput("hypervolume: non-finite objective vector");
    if ((rows.row(i).transpose().array() <= ref.array()).all())
      pts.push_back(rows.row(i).data());
    else
      ++clipped;
  }
  if (clipped > 0)
    log::warn("hypervolume: " + std::to_string(clipped) + " point(s) beyond the reference point were clipped");
  return sweep(std::move(pts), k, ref.data());
}

double hypervolume(const ParetoFront& front) { return hypervolume(front.points, front.ref); }

MonteCarloEstimate hypervolume_mc(const Eigen::MatrixXd& points, const Eigen::VectorXd& ref, std::size_t samples,
                                  std::uint64_t seed) {
  if (points.rows() == 0) return {};
  if (points.cols() != ref.size()) throw DimensionMismatch("hypervolume_mc: points and reference point differ");
  if (samples == 0) throw InvalidInput("hypervolume_mc: need at least one sample");
  const Eigen::VectorXd lower = points.colwise().minCoeff().transpose().cwiseMin(ref);
  const Eigen::VectorXd span = ref - lower;
  const double box = span.prod();
  if (!(box > 0.0)) return {};

  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd s(ref.size());
  std::size_t hits = 0;
  for (std::size_t n = 0; n < samples; ++n) {
    for (Eigen::Index c = 0; c < s.size(); ++c) s[c] = lower[c] + unit(rng) * span[c];
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if ((points.row(i).transpose().array() <= s.array()).all()) {
        ++hits;
        break;
      }
    }
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(samples);
  return {frac * box, box * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples))};
}

}  // namespace maobo::pareto
