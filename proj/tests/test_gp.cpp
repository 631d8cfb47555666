#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "maobo/errors.hpp"
#include "maobo/gp.hpp"
#include "maobo/random.hpp"

using namespace maobo;
using gp::GpModel;
using gp::KernelFamily;
using gp::KernelSpec;

namespace {

KernelSpec make_kernel(KernelFamily family, Eigen::VectorXd ls, double sf2, double sn2) {
  KernelSpec k;
  k.family = family;
  k.lengthscales = std::move(ls);
  k.signal_variance = sf2;
  k.noise_variance = sn2;
  return k;
}

struct Instance {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  KernelSpec kernel;
};

Instance random_instance(Rng& rng, Eigen::Index n, Eigen::Index d, KernelFamily family) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> logu(std::log(0.2), std::log(2.0));
  Instance in;
  in.x = Eigen::MatrixXd::NullaryExpr(n, d, [&] { return unit(rng); });
  in.y = Eigen::VectorXd::NullaryExpr(n, [&] { return 2.0 * unit(rng) - 1.0; });
  Eigen::VectorXd ls(d);
  for (Eigen::Index i = 0; i < d; ++i) ls[i] = std::exp(logu(rng));
  in.kernel = make_kernel(family, ls, std::exp(logu(rng)), 0.05 * std::exp(logu(rng)));
  return in;
}

Eigen::MatrixXd gram(const KernelSpec& k, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(x.rows(), x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.rows(); ++j)
      out(i, j) = gp::kernel_eval(k, x.row(i).transpose(), x.row(j).transpose(), i == j);
  return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("kernel hand cases") {
  const Eigen::VectorXd x = Eigen::Vector2d(0.3, -0.1);
  CHECK(gp::kernel_eval(make_kernel(KernelFamily::SquaredExponential, Eigen::Vector2d(1, 1), 1.0, 0.0), x, x,
                        false) == doctest::Approx(1.0));
  const Eigen::VectorXd xp = x + Eigen::Vector2d(1.0, 0.0);
  CHECK(gp::kernel_eval(make_kernel(KernelFamily::SquaredExponential, Eigen::Vector2d(1, 1), 1.0, 0.0), x, xp,
                        false) == doctest::Approx(std::exp(-0.5)));
  CHECK(gp::kernel_eval(make_kernel(KernelFamily::SquaredExponential, Eigen::Vector2d(1, 1), 2.0, 0.1), x, x,
                        true) == doctest::Approx(2.1));
  // matern 5/2 at r = 1: (1 + sqrt5 + 5/3) exp(-sqrt5)
  const double s5 = std::sqrt(5.0);
  CHECK(gp::kernel_eval(make_kernel(KernelFamily::Matern52, Eigen::Vector2d(1, 1), 1.0, 0.0), x, xp, false) ==
        doctest::Approx((1.0 + s5 + 5.0 / 3.0) * std::exp(-s5)));
}

TEST_CASE("kernel is symmetric and rejects non-finite input") {
  Rng rng(3);
  for (auto family : {KernelFamily::SquaredExponential, KernelFamily::Matern52}) {
    const auto in = random_instance(rng, 6, 3, family);
    for (Eigen::Index i = 0; i < 6; ++i)
      for (Eigen::Index j = 0; j < 6; ++j)
        CHECK(gp::kernel_eval(in.kernel, in.x.row(i).transpose(), in.x.row(j).transpose(), false) ==
              gp::kernel_eval(in.kernel, in.x.row(j).transpose(), in.x.row(i).transpose(), false));
  }
  const auto k = make_kernel(KernelFamily::SquaredExponential, Eigen::Vector2d(1, 1), 1.0, 0.0);
  CHECK_THROWS_AS(gp::kernel_eval(k, Eigen::Vector2d(NAN, 0), Eigen::Vector2d(0, 0), false), InvalidInput);
  CHECK_THROWS_AS(gp::kernel_eval(k, Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(0, 0, 0), false),
                  DimensionMismatch);
}

TEST_CASE("kernel spec validation") {
  CHECK_THROWS_AS(make_kernel(KernelFamily::Matern52, Eigen::Vector2d(1, -1), 1, 0).validate(), InvalidInput);
  CHECK_THROWS_AS(make_kernel(KernelFamily::Matern52, Eigen::Vector2d(1, 1), 0, 0).validate(), InvalidInput);
  CHECK_THROWS_AS(make_kernel(KernelFamily::Matern52, Eigen::Vector2d(1, 1), 1, -1).validate(), InvalidInput);
  CHECK_THROWS_AS(make_kernel(KernelFamily::Matern52, Eigen::Vector2d(1, 1), 1, 0).validate(3), DimensionMismatch);
  const auto k = make_kernel(KernelFamily::Matern52, Eigen::Vector2d(0.5, 2.0), 3.0, 0.01);
  const auto back = KernelSpec::from_log_params(k.family, k.log_params());
  CHECK((back.lengthscales - k.lengthscales).norm() < 1e-15);
  CHECK(back.signal_variance == doctest::Approx(3.0));
  CHECK(back.noise_variance == doctest::Approx(0.01));
}

TEST_CASE("single noiseless point is interpolated") {
  Eigen::MatrixXd x(1, 1);
  x << 0.4;
  Eigen::VectorXd y(1);
  y << 1.7;
  const auto m = GpModel::assemble(x, y, make_kernel(KernelFamily::SquaredExponential, Eigen::VectorXd::Ones(1), 1.0, 0.0));
  const auto p = m.predict(x);
  CHECK(std::abs(p.mean[0] - 1.7) < 1e-8);
  CHECK(std::abs(p.variance[0]) < 1e-8);
}

TEST_CASE("far from the data the posterior reverts to the prior") {
  Eigen::MatrixXd x(2, 1);
  x << 0.0, 0.1;
  const auto m = GpModel::assemble(x, Eigen::Vector2d(1.0, -2.0),
                                   make_kernel(KernelFamily::SquaredExponential, Eigen::VectorXd::Ones(1), 2.5, 1e-4));
  Eigen::MatrixXd far(1, 1);
  far << 100.0;
  const auto p = m.predict(far);
  CHECK(std::abs(p.mean[0]) < 1e-12);
  CHECK(p.variance[0] == doctest::Approx(2.5));
}

TEST_CASE("noiseless interpolation of training data") {
  Rng rng(11);
  for (auto family : {KernelFamily::SquaredExponential, KernelFamily::Matern52}) {
    auto in = random_instance(rng, 15, 2, family);
    in.kernel.noise_variance = 0.0;
    const auto m = GpModel::assemble(in.x, in.y, in.kernel);
    const auto p = m.predict(in.x);
    CHECK((p.mean - in.y).lpNorm<Eigen::Infinity>() <= 1e-6);
  }
}

TEST_CASE("predict matches the dense-inverse oracle") {
  Rng rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const auto family = rep % 2 ? KernelFamily::Matern52 : KernelFamily::SquaredExponential;
    const auto in = random_instance(rng, 5, 2, family);
    const Eigen::MatrixXd grid = Eigen::MatrixXd::NullaryExpr(7, 2, [&] { return unit(rng); });
    const Eigen::MatrixXd kinv = gram(in.kernel, in.x).fullPivLu().inverse();
    const Eigen::MatrixXd ks = gp::cross_covariance(in.kernel, grid, in.x);
    const Eigen::VectorXd mean = ks * kinv * in.y;
    const auto m = GpModel::assemble(in.x, in.y, in.kernel);
    const auto p = m.predict(grid);
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
      const double var = in.kernel.signal_variance - ks.row(i).dot(kinv * ks.row(i).transpose());
      CHECK(rel(p.mean[i], mean[i]) <= 1e-8);
      CHECK(rel(p.variance[i], var) <= 1e-8);
    }
  }
}

TEST_CASE("log marginal hand cases") {
  Eigen::MatrixXd x1(1, 1);
  x1 << 0.0;
  const auto m1 = GpModel::assemble(x1, Eigen::VectorXd::Zero(1),
                                    make_kernel(KernelFamily::SquaredExponential, Eigen::VectorXd::Ones(1), 0.5, 0.5));
  CHECK(m1.log_marginal() == doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)));
  CHECK(m1.log_marginal() == doctest::Approx(-0.9189).epsilon(1e-4));

  // far-apart inputs give an identity covariance
  Eigen::MatrixXd x2(2, 1);
  x2 << 0.0, 1e3;
  const auto m2 = GpModel::assemble(x2, Eigen::Vector2d(1.0, 0.0),
                                    make_kernel(KernelFamily::SquaredExponential, Eigen::VectorXd::Ones(1), 0.5, 0.5));
  CHECK(m2.log_marginal() == doctest::Approx(-0.5 - std::log(2.0 * std::numbers::pi)));
}

TEST_CASE("log marginal matches the dense oracle") {
  Rng rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const auto in = random_instance(rng, 6, 2, rep % 2 ? KernelFamily::Matern52 : KernelFamily::SquaredExponential);
    const Eigen::MatrixXd k = gram(in.kernel, in.x);
    const double oracle = -0.5 * in.y.dot(k.fullPivLu().inverse() * in.y) - 0.5 * std::log(k.determinant()) -
                          3.0 * std::log(2.0 * std::numbers::pi);
    CHECK(rel(GpModel::assemble(in.x, in.y, in.kernel).log_marginal(), oracle) <= 1e-8);
  }
}

TEST_CASE("gradient matches central finite differences on 50 instances") {
  Rng rng(23);
  const double h = 1e-5;
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const auto family = rep % 2 ? KernelFamily::Matern52 : KernelFamily::SquaredExponential;
    const auto in = random_instance(rng, 8, 2, family);
    const Eigen::VectorXd grad = GpModel::assemble(in.x, in.y, in.kernel).log_marginal_grad();
    const Eigen::VectorXd theta = in.kernel.log_params();
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      Eigen::VectorXd up = theta, dn = theta;
      up[j] += h;
      dn[j] -= h;
      const double fu = GpModel::assemble(in.x, in.y, KernelSpec::from_log_params(family, up)).log_marginal();
      const double fd = GpModel::assemble(in.x, in.y, KernelSpec::from_log_params(family, dn)).log_marginal();
      const double numeric = (fu - fd) / (2.0 * h);
      worst = std::max(worst, std::abs(grad[j] - numeric) / std::max(std::abs(numeric), 1e-2));
    }
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("zero targets leave only the log-determinant gradient") {
  Rng rng(29);
  auto in = random_instance(rng, 6, 2, KernelFamily::Matern52);
  in.y.setZero();
  const auto m = GpModel::assemble(in.x, in.y, in.kernel);
  CHECK(m.alpha().norm() == 0.0);
  // d/dlog sn2 of -0.5 log|K| is -0.5 sn2 tr(K^-1)
  const Eigen::MatrixXd kinv = gram(in.kernel, in.x).inverse();
  CHECK(m.log_marginal_grad()[3] == doctest::Approx(-0.5 * in.kernel.noise_variance * kinv.trace()));
}

TEST_CASE("posterior variance never grows when data is added") {
  Rng rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const auto in = random_instance(rng, 10, 2, KernelFamily::Matern52);
    const Eigen::MatrixXd grid = Eigen::MatrixXd::NullaryExpr(50, 2, [&] { return unit(rng); });
    const auto small = GpModel::assemble(in.x.topRows(6), in.y.head(6), in.kernel).predict(grid);
    const auto big = GpModel::assemble(in.x, in.y, in.kernel).predict(grid);
    CHECK((big.variance - small.variance).maxCoeff() <= 1e-8);
  }
}

TEST_CASE("fit recovers at least the generating likelihood") {
  Rng rng(37);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  const Eigen::Index n = 100;
  const Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(n, 1, [&] { return unit(rng); });
  const auto truth = make_kernel(KernelFamily::SquaredExponential, Eigen::VectorXd::Constant(1, 0.5), 1.0, 0.01);
  const Eigen::MatrixXd l = gram(truth, x).llt().matrixL();
  const Eigen::VectorXd y = l * Eigen::VectorXd::NullaryExpr(n, [&] { return normal(rng); });

  const auto fitted = gp::fit_map(x, y, KernelFamily::SquaredExponential);
  // generating hyperparameters expressed on the fitted model's standardized scale
  const double s2 = fitted.y_scale() * fitted.y_scale();
  const auto scaled = make_kernel(KernelFamily::SquaredExponential, truth.lengthscales, 1.0 / s2, 0.01 / s2);
  const auto at_truth = GpModel::assemble(x, y, scaled, fitted.y_offset(), fitted.y_scale());
  CHECK(fitted.log_marginal() >= at_truth.log_marginal() - 1e-6);
  // stationarity in the noise direction
  CHECK(std::abs(fitted.log_marginal_grad()[2]) < 1e-3);
}

TEST_CASE("fit of linear data predicts held-out midpoints") {
  Eigen::MatrixXd x(11, 1);
  for (int i = 0; i < 11; ++i) x(i, 0) = i / 10.0;
  const Eigen::VectorXd y = x.col(0);
  const auto m = gp::fit_map(x, y, KernelFamily::Matern52);
  Eigen::MatrixXd mid(10, 1);
  for (int i = 0; i < 10; ++i) mid(i, 0) = (i + 0.5) / 10.0;
  const auto p = m.predict(mid);
  CHECK((p.mean - mid.col(0)).lpNorm<Eigen::Infinity>() <= 1e-2);
}

TEST_CASE("duplicate inputs with conflicting targets are absorbed by noise") {
  Eigen::MatrixXd x(4, 1);
  x << 0.2, 0.2, 0.7, 0.9;
  const auto m = gp::fit_map(x, Eigen::Vector4d(1.0, -1.0, 0.5, 0.3), KernelFamily::Matern52);
  CHECK(m.kernel().noise_variance > 0.0);
  const Eigen::MatrixXd l = m.chol();
  CHECK(l.allFinite());
}

TEST_CASE("fit is deterministic for a seed") {
  Rng rng(41);
  const auto in = random_instance(rng, 20, 2, KernelFamily::Matern52);
  gp::FitOptions opts;
  opts.seed = 9;
  const auto a = gp::fit_map(in.x, in.y, KernelFamily::Matern52, opts);
  const auto b = gp::fit_map(in.x, in.y, KernelFamily::Matern52, opts);
  CHECK(a.kernel().log_params() == b.kernel().log_params());
}

TEST_CASE("fit input validation") {
  Eigen::MatrixXd x(1, 1);
  x << 0.0;
  CHECK_THROWS_AS(gp::fit_map(x, Eigen::VectorXd::Zero(1), KernelFamily::Matern52), InvalidInput);
  Eigen::MatrixXd x2(2, 1);
  x2 << 0.0, NAN;
  CHECK_THROWS_AS(gp::fit_map(x2, Eigen::VectorXd::Zero(2), KernelFamily::Matern52), InvalidInput);
  CHECK_THROWS_AS(gp::fit_map(x2.topRows(1), Eigen::VectorXd::Zero(2), KernelFamily::Matern52), Error);
}
