#include "maobo/gp.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "maobo/errors.hpp"
#include "maobo/quasi_newton.hpp"
#include "maobo/random.hpp"

namespace maobo::gp {
namespace {

constexpr double kSqrt5 = 2.2360679774997896964;
constexpr double kLog2Pi = 1.8378770664093454836;

// Squared coordinate differences, one n x n matrix per input dimension.
std::vector<Eigen::MatrixXd> coordinate_gaps(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  std::vector<Eigen::MatrixXd> gaps;
  gaps.reserve(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index q = 0; q < n; ++q)
      for (Eigen::Index p = 0; p < n; ++p) {
        const double diff = x(p, c) - x(q, c);
        g(p, q) = diff * diff;
      }
    gaps.push_back(std::move(g));
  }
  return gaps;
}

// Covariance as a function of the scaled squared distance r2.
double profile(KernelFamily family, double sf2, double r2) {
  switch (family) {
    case KernelFamily::SquaredExponential:
      return sf2 * std::exp(-0.5 * r2);
    case KernelFamily::Matern52: {
      const double r = std::sqrt(r2);
      return sf2 * (1.0 + kSqrt5 * r + (5.0 / 3.0) * r2) * std::exp(-kSqrt5 * r);
    }
  }
  return 0.0;
}

// d k / d log(l_i) = slope(r2) * (dx_i / l_i)^2.
double profile_slope(KernelFamily family, double sf2, double r2) {
  switch (family) {
    case KernelFamily::SquaredExponential:
      return sf2 * std::exp(-0.5 * r2);
    case KernelFamily::Matern52: {
      const double r = std::sqrt(r2);
      return sf2 * (5.0 / 3.0) * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
    }
  }
  return 0.0;
}

struct Factorization {
  Eigen::MatrixXd lower;
  double jitter = 0.0;
};

// Cholesky of `a`, escalating diagonal jitter 1e-10 -> 1e-6 (relative to the
// mean diagonal) on failure.
std::optional<Factorization> factorize(const Eigen::MatrixXd& a) {
  const double scale = std::max(a.diagonal().mean(), 1e-300);
  static constexpr double kJitters[] = {0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6};
  for (double j : kJitters) {
    Eigen::MatrixXd m = a;
    if (j > 0.0) m.diagonal().array() += j * scale;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) {
      Factorization f{llt.matrixL(), j * scale};
      if (f.lower.allFinite()) return f;
    }
  }
  return std::nullopt;
}

struct Evaluation {
  double log_marginal;
  Eigen::VectorXd gradient;
};

// Log marginal likelihood and its gradient with respect to log parameters,
// from precomputed coordinate gaps.
std::optional<Evaluation> evaluate(const KernelSpec& spec, const std::vector<Eigen::MatrixXd>& gaps,
                                   const Eigen::VectorXd& y, bool with_gradient) {
  const Eigen::Index n = y.size();
  const std::size_t d = spec.dim();
  Eigen::MatrixXd r2 = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < d; ++i) {
    const double l = spec.lengthscales[static_cast<Eigen::Index>(i)];
    r2 += gaps[i] / (l * l);
  }
  Eigen::MatrixXd signal(n, n);
  for (Eigen::Index q = 0; q < n; ++q)
    for (Eigen::Index p = 0; p < n; ++p) signal(p, q) = profile(spec.family, spec.signal_variance, r2(p, q));

  Eigen::MatrixXd cov = signal;
  cov.diagonal().array() += spec.noise_variance;
  const auto fac = factorize(cov);
  if (!fac) return std::nullopt;

  const auto tri = fac->lower.triangularView<Eigen::Lower>();
  Eigen::VectorXd alpha = tri.solve(y);
  const double quad = alpha.squaredNorm();
  alpha = tri.transpose().solve(alpha);
  const double logdet = 2.0 * fac->lower.diagonal().array().log().sum();

  Evaluation out;
  out.log_marginal = -0.5 * quad - 0.5 * logdet - 0.5 * static_cast<double>(n) * kLog2Pi;
  if (!std::isfinite(out.log_marginal)) return std::nullopt;
  if (!with_gradient) return out;

  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(n, n);
  tri.solveInPlace(inv);
  tri.transpose().solveInPlace(inv);
  const Eigen::MatrixXd w = alpha * alpha.transpose() - inv;

  out.gradient.resize(static_cast<Eigen::Index>(d + 2));
  if (d > 0) {
    Eigen::MatrixXd slope(n, n);
    for (Eigen::Index q = 0; q < n; ++q)
      for (Eigen::Index p = 0; p < n; ++p)
        slope(p, q) = profile_slope(spec.family, spec.signal_variance, r2(p, q));
    const Eigen::MatrixXd ws = w.cwiseProduct(slope);
    for (std::size_t i = 0; i < d; ++i) {
      const double l = spec.lengthscales[static_cast<Eigen::Index>(i)];
      out.gradient[static_cast<Eigen::Index>(i)] = 0.5 * ws.cwiseProduct(gaps[i]).sum() / (l * l);
    }
  }
  out.gradient[static_cast<Eigen::Index>(d)] = 0.5 * w.cwiseProduct(signal).sum();
  out.gradient[static_cast<Eigen::Index>(d + 1)] = 0.5 * spec.noise_variance * w.trace();
  return out;
}

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw InvalidInput(std::string(what) + " contains non-finite values");
}

}  // namespace

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::SquaredExponential:
      return "squared_exponential";
    case KernelFamily::Matern52:
      return "matern52";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "squared_exponential" || name == "se") return KernelFamily::SquaredExponential;
  if (name == "matern52") return KernelFamily::Matern52;
  throw InvalidInput("unknown kernel family '" + name + "'");
}

void KernelSpec::validate(std::size_t expected_dim) const {
  if (lengthscales.size() == 0) throw InvalidInput("kernel needs at least one lengthscale");
  if (expected_dim != 0 && dim() != expected_dim)
    throw DimensionMismatch("kernel has " + std::to_string(dim()) + " lengthscales, input has " +
                            std::to_string(expected_dim) + " dimensions");
  if (!lengthscales.allFinite() || (lengthscales.array() <= 0.0).any())
    throw InvalidInput("lengthscales must be positive and finite");
  if (!std::isfinite(signal_variance) || signal_variance <= 0.0)
    throw InvalidInput("signal variance must be positive");
  if (!std::isfinite(noise_variance) || noise_variance < 0.0)
    throw InvalidInput("noise variance must be non-negative");
}

Eigen::VectorXd KernelSpec::log_params() const {
  const auto d = lengthscales.size();
  Eigen::VectorXd theta(d + 2);
  theta.head(d) = lengthscales.array().log().matrix();
  theta[d] = std::log(signal_variance);
  theta[d + 1] = std::log(noise_variance);
  return theta;
}

KernelSpec KernelSpec::from_log_params(KernelFamily family, const Eigen::VectorXd& theta) {
  if (theta.size() < 3) throw InvalidInput("log-parameter vector too short");
  const auto d = theta.size() - 2;
  KernelSpec spec;
  spec.family = family;
  spec.lengthscales = theta.head(d).array().exp().matrix();
  spec.signal_variance = std::exp(theta[d]);
  spec.noise_variance = std::exp(theta[d + 1]);
  return spec;
}

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& xp, bool same_point) {
  if (static_cast<std::size_t>(x.size()) != spec.dim() || static_cast<std::size_t>(xp.size()) != spec.dim())
    throw DimensionMismatch("kernel_eval: point dimension does not match kernel");
  if (!x.allFinite() || !xp.allFinite()) throw InvalidInput("kernel_eval: non-finite input");
  const double r2 = ((x - xp).array() / spec.lengthscales.array()).square().sum();
  double k = profile(spec.family, spec.signal_variance, r2);
  if (same_point) k += spec.noise_variance;
  return k;
}

Eigen::MatrixXd cross_covariance(const KernelSpec& spec, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (static_cast<std::size_t>(a.cols()) != spec.dim() || static_cast<std::size_t>(b.cols()) != spec.dim())
    throw DimensionMismatch("cross_covariance: point dimension does not match kernel");
  const Eigen::ArrayXd inv_l = spec.lengthscales.array().inverse();
  const Eigen::MatrixXd as = (a.array().rowwise() * inv_l.transpose()).matrix();
  const Eigen::MatrixXd bs = (b.array().rowwise() * inv_l.transpose()).matrix();
  const Eigen::VectorXd an = as.rowwise().squaredNorm();
  const Eigen::VectorXd bn = bs.rowwise().squaredNorm();
  Eigen::MatrixXd out = -2.0 * as * bs.transpose();
  out.colwise() += an;
  out.rowwise() += bn.transpose();
  for (Eigen::Index q = 0; q < out.cols(); ++q)
    for (Eigen::Index p = 0; p < out.rows(); ++p)
      out(p, q) = profile(spec.family, spec.signal_variance, std::max(out(p, q), 0.0));
  return out;
}

GpModel GpModel::assemble(Eigen::MatrixXd x, const Eigen::VectorXd& y, KernelSpec kernel, double y_offset,
                          double y_scale) {
  if (x.rows() < 1) throw InvalidInput("GP needs at least one training point");
  if (x.rows() != y.size()) throw DimensionMismatch("GP inputs and targets differ in length");
  check_finite(x, "training inputs");
  check_finite(y, "training targets");
  kernel.validate(static_cast<std::size_t>(x.cols()));
  if (!(y_scale > 0.0) || !std::isfinite(y_offset)) throw InvalidInput("invalid target standardization");

  GpModel m;
  m.kernel_ = std::move(kernel);
  m.y_offset_ = y_offset;
  m.y_scale_ = y_scale;
  m.y_ = ((y.array() - y_offset) / y_scale).matrix();

  Eigen::MatrixXd cov = cross_covariance(m.kernel_, x, x);
  cov.diagonal().array() += m.kernel_.noise_variance;
  const auto fac = factorize(cov);
  if (!fac) throw NumericalError("Cholesky factorization failed after jitter escalation");
  m.chol_ = fac->lower;
  m.jitter_ = fac->jitter;
  m.alpha_ = m.chol_.triangularView<Eigen::Lower>().solve(m.y_);
  m.chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(m.alpha_);
  m.x_ = std::move(x);
  return m;
}

PredictiveSummary GpModel::predict(std::shared_ptr<const Eigen::MatrixXd> grid) const {
  if (!grid) throw InvalidInput("predict: null grid");
  if (static_cast<std::size_t>(grid->cols()) != dim())
    throw DimensionMismatch("predict: grid has " + std::to_string(grid->cols()) + " columns, model expects " +
                            std::to_string(dim()));
  const Eigen::MatrixXd kstar = cross_covariance(kernel_, *grid, x_);  // m x n
  PredictiveSummary out;
  out.mean = kstar * alpha_;
  const Eigen::MatrixXd v = chol_.triangularView<Eigen::Lower>().solve(kstar.transpose());  // n x m
  out.variance = (kernel_.signal_variance - v.colwise().squaredNorm().array()).max(0.0).matrix().transpose();
  out.mean = (out.mean.array() * y_scale_ + y_offset_).matrix();
  out.variance *= y_scale_ * y_scale_;
  out.grid = std::move(grid);
  return out;
}

PredictiveSummary GpModel::predict(const Eigen::MatrixXd& grid) const {
  return predict(std::make_shared<const Eigen::MatrixXd>(grid));
}

double GpModel::log_marginal() const {
  const double n = static_cast<double>(y_.size());
  return -0.5 * y_.dot(alpha_) - chol_.diagonal().array().log().sum() - 0.5 * n * kLog2Pi;
}

Eigen::VectorXd GpModel::log_marginal_grad() const {
  const auto eval = evaluate(kernel_, coordinate_gaps(x_), y_, true);
  if (!eval) throw NumericalError("log_marginal_grad: factorization failed");
  return eval->gradient;
}

GpModel fit_map(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, KernelFamily family,
                const FitOptions& options) {
  if (x.rows() < 2) throw InvalidInput("fit_map needs at least two training points");
  if (x.rows() != y.size()) throw DimensionMismatch("fit_map: inputs and targets differ in length");
  if (x.cols() < 1) throw InvalidInput("fit_map: zero-dimensional inputs");
  check_finite(x, "training inputs");
  check_finite(y, "training targets");
  if (options.restarts < 1) throw InvalidInput("fit_map needs at least one restart");

  const Eigen::Index d = x.cols();
  double offset = 0.0;
  double scale = 1.0;
  if (options.standardize) {
    offset = y.mean();
    const double var = (y.array() - offset).square().sum() / static_cast<double>(y.size() - 1);
    scale = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  const Eigen::VectorXd ys = ((y.array() - offset) / scale).matrix();
  const double var_y = std::max((ys.array() - ys.mean()).square().sum() / static_cast<double>(ys.size() - 1),
                                options.lower_bound);

  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(d + 2, std::log(options.lower_bound));
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(d + 2, std::log(options.upper_bound));
  const Eigen::VectorXd width =
      (x.colwise().maxCoeff() - x.colwise().minCoeff()).transpose().unaryExpr([](double w) {
        return w > 0.0 ? w : 1.0;
      });

  const auto gaps = coordinate_gaps(x);
  const Objective objective = [&](const Eigen::VectorXd& theta) -> std::optional<ValueGradient> {
    const auto eval = evaluate(KernelSpec::from_log_params(family, theta), gaps, ys, true);
    if (!eval) return std::nullopt;
    return ValueGradient{eval->log_marginal, eval->gradient};
  };

  QuasiNewtonOptions qn;
  qn.max_iterations = options.max_iterations;

  Rng rng(options.seed);
  std::uniform_real_distribution<double> log_unit(std::log(0.05), std::log(2.0));
  std::optional<QuasiNewtonResult> best;
  std::ostringstream failures;
  for (int r = 0; r < options.restarts; ++r) {
    Eigen::VectorXd start(d + 2);
    for (Eigen::Index i = 0; i < d; ++i) start[i] = std::log(width[i]) + log_unit(rng);
    start[d] = std::log(var_y);
    start[d + 1] = std::log(1e-2 * var_y);
    auto res = maximize_in_box(objective, start, lo, hi, qn);
    if (!res) {
      failures << " restart " << r << ": factorization failed at start;";
      continue;
    }
    if (!best || res->value > best->value) best = std::move(res);
  }
  if (!best)
    throw NumericalError("fit_map: all " + std::to_string(options.restarts) + " restarts failed (n=" +
                         std::to_string(x.rows()) + ", d=" + std::to_string(d) + "):" + failures.str());

  return GpModel::assemble(x, y, KernelSpec::from_log_params(family, best->x), offset, scale);
}

}  // namespace maobo::gp
