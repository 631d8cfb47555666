#include "maobo/quasi_newton.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace maobo {
namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Variables pinned at a bound with the ascent direction pointing out of the box.
Eigen::Array<bool, Eigen::Dynamic, 1> pinned(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                                             const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  Eigen::Array<bool, Eigen::Dynamic, 1> out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    out[i] = (x[i] <= lo[i] && grad[i] < 0.0) || (x[i] >= hi[i] && grad[i] > 0.0);
  return out;
}

bool usable(const std::optional<ValueGradient>& vg) {
  return vg && std::isfinite(vg->value) && vg->gradient.allFinite();
}

}  // namespace

std::optional<QuasiNewtonResult> maximize_in_box(const Objective& objective,
                                                 const Eigen::VectorXd& start,
                                                 const Eigen::VectorXd& lower,
                                                 const Eigen::VectorXd& upper,
                                                 const QuasiNewtonOptions& options) {
  const Eigen::Index n = start.size();
  Eigen::VectorXd x = clamp(start, lower, upper);
  auto current = objective(x);
  if (!usable(current)) return std::nullopt;

  QuasiNewtonResult result;
  result.evaluations = 1;
  double f = current->value;
  Eigen::VectorXd g = current->gradient;
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);  // inverse Hessian of -f
  bool fresh = true;
  int stalls = 0;
  Eigen::Array<bool, Eigen::Dynamic, 1> last_fixed = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false);

  for (int it = 0; it < options.max_iterations; ++it) {
    result.iterations = it + 1;
    const auto fixed = pinned(x, g, lower, upper);
    if ((fixed != last_fixed).any()) {
      h.setIdentity();
      fresh = true;
      last_fixed = fixed;
    }
    Eigen::VectorXd g_free = g;
    for (Eigen::Index i = 0; i < n; ++i)
      if (fixed[i]) g_free[i] = 0.0;
    if (g_free.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd dir = h * g_free;
    for (Eigen::Index i = 0; i < n; ++i)
      if (fixed[i]) dir[i] = 0.0;
    if (dir.dot(g_free) <= 0.0) {
      h.setIdentity();
      dir = g_free;
      fresh = true;
    }

    double step = 1.0;
    if (fresh) {
      const double len = dir.lpNorm<Eigen::Infinity>();
      if (len > options.max_initial_step) step = options.max_initial_step / len;
    }

    Eigen::VectorXd x_new;
    std::optional<ValueGradient> trial;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = clamp(x + step * dir, lower, upper);
      const Eigen::VectorXd delta = x_new - x;
      if (delta.lpNorm<Eigen::Infinity>() == 0.0) break;
      trial = objective(x_new);
      ++result.evaluations;
      if (usable(trial) && trial->value >= f + 1e-4 * g.dot(delta)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (fresh) {
        result.converged = true;  // no ascent possible along the gradient
        break;
      }
      h.setIdentity();
      fresh = true;
      continue;
    }

    const Eigen::VectorXd s = x_new - x;
    // BFGS on -f: y = grad(-f)_new - grad(-f)_old.
    const Eigen::VectorXd y = g - trial->gradient;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh) h *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      h = (eye - rho * s * y.transpose()) * h * (eye - rho * y * s.transpose()) +
          rho * s * s.transpose();
      fresh = false;
    }

    const double change = std::abs(trial->value - f);
    x = x_new;
    f = trial->value;
    g = trial->gradient;
    if (change <= options.value_tolerance * (1.0 + std::abs(f))) {
      if (++stalls >= 3) {
        result.converged = true;
        break;
      }
    } else {
      stalls = 0;
    }
  }

  result.x = x;
  result.value = f;
  result.gradient = g;
  return result;
}

}  // namespace maobo
