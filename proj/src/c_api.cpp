#include "maobo/maobo.h"

#include <cstring>
#include <new>
#include <string>

#include "maobo/config.hpp"
#include "maobo/errors.hpp"
#include "maobo/experiment.hpp"
#include "maobo/gp.hpp"
#include "maobo/log.hpp"
#include "maobo/pareto.hpp"
#include "maobo/plotdata.hpp"
#include "maobo/study.hpp"

struct maobo_experiment {
  maobo::ExperimentConfig config;
  std::string output;
  std::optional<maobo::StudyResult> study;
  std::vector<std::string> labels;  // f, g per study pair
};

struct maobo_gp {
  maobo::gp::GpModel model;
};

namespace {

thread_local std::string g_last_error;

maobo_status code_of(maobo::ErrorCode c) {
  switch (c) {
    case maobo::ErrorCode::InvalidInput:
      return MAOBO_ERR_INVALID_ARGUMENT;
    case maobo::ErrorCode::DimensionMismatch:
      return MAOBO_ERR_DIMENSION;
    case maobo::ErrorCode::Numerical:
      return MAOBO_ERR_NUMERICAL;
    case maobo::ErrorCode::UnsupportedDimension:
      return MAOBO_ERR_UNSUPPORTED;
    case maobo::ErrorCode::Config:
      return MAOBO_ERR_CONFIG;
    case maobo::ErrorCode::Io:
      return MAOBO_ERR_IO;
    case maobo::ErrorCode::RunFailed:
      return MAOBO_ERR_RUN_FAILED;
  }
  return MAOBO_ERR_INTERNAL;
}

maobo_status fail(maobo_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <typename F>
maobo_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const maobo::Error& e) {
    return fail(code_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MAOBO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MAOBO_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MAOBO_ERR_INTERNAL, "unknown error");
  }
}

#define MAOBO_REQUIRE(cond, msg) \
  if (!(cond)) return fail(MAOBO_ERR_INVALID_ARGUMENT, msg)

Eigen::MatrixXd rows(const double* data, size_t n, size_t d) {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      data, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
}

maobo::gp::KernelFamily family_of(maobo_kernel k) {
  switch (k) {
    case MAOBO_KERNEL_SQUARED_EXPONENTIAL:
      return maobo::gp::KernelFamily::SquaredExponential;
    case MAOBO_KERNEL_MATERN52:
      return maobo::gp::KernelFamily::Matern52;
  }
  throw maobo::InvalidInput("unknown kernel");
}

std::string output_dir(const maobo_experiment* exp) {
  return exp->output.empty() ? exp->config.sweep.output : exp->output;
}

maobo_status make_experiment(maobo::ExperimentConfig cfg, maobo_experiment** out) {
  auto* exp = new maobo_experiment;
  exp->config = std::move(cfg);
  *out = exp;
  return MAOBO_OK;
}

}  // namespace

extern "C" {

MAOBO_API void maobo_set_verbosity(int level) {
  if (level < 0) level = 0;
  if (level > 3) level = 3;
  maobo::log::set_level(static_cast<maobo::log::Level>(level));
}

MAOBO_API const char* maobo_last_error(void) { return g_last_error.c_str(); }

MAOBO_API const char* maobo_status_string(maobo_status status) {
  switch (status) {
    case MAOBO_OK:
      return "ok";
    case MAOBO_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case MAOBO_ERR_DIMENSION:
      return "dimension mismatch";
    case MAOBO_ERR_NUMERICAL:
      return "numerical failure";
    case MAOBO_ERR_UNSUPPORTED:
      return "unsupported dimension";
    case MAOBO_ERR_CONFIG:
      return "configuration error";
    case MAOBO_ERR_IO:
      return "i/o error";
    case MAOBO_ERR_RUN_FAILED:
      return "run failed";
    case MAOBO_ERR_BUFFER_TOO_SMALL:
      return "buffer too small";
    case MAOBO_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

MAOBO_API const char* maobo_version(void) { return "1.0.0"; }

MAOBO_API maobo_status maobo_experiment_from_file(const char* path, maobo_experiment** out) {
  MAOBO_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] { return make_experiment(maobo::load_config(path), out); });
}

MAOBO_API maobo_status maobo_experiment_from_string(const char* text, maobo_experiment** out) {
  MAOBO_REQUIRE(text && out, "null argument");
  *out = nullptr;
  return guarded([&] { return make_experiment(maobo::parse_config(text), out); });
}

MAOBO_API void maobo_experiment_destroy(maobo_experiment* exp) { delete exp; }

MAOBO_API maobo_status maobo_experiment_set_seed(maobo_experiment* exp, uint64_t seed) {
  MAOBO_REQUIRE(exp, "null experiment");
  exp->config.run.seed = seed;
  exp->config.sweep.seeds = {seed};
  exp->config.study.seeds = {seed};
  return MAOBO_OK;
}

MAOBO_API maobo_status maobo_experiment_set_reduction(maobo_experiment* exp, int enabled) {
  MAOBO_REQUIRE(exp, "null experiment");
  exp->config.run.reduction = enabled != 0;
  return MAOBO_OK;
}

MAOBO_API maobo_status maobo_experiment_set_output(maobo_experiment* exp, const char* dir) {
  MAOBO_REQUIRE(exp && dir && *dir, "null or empty output directory");
  exp->output = dir;
  return MAOBO_OK;
}

MAOBO_API maobo_status maobo_experiment_serialize(const maobo_experiment* exp, char* buf, size_t cap,
                                                  size_t* needed) {
  MAOBO_REQUIRE(exp, "null experiment");
  return guarded([&] {
    const std::string text = maobo::serialize_config(exp->config);
    if (needed) *needed = text.size() + 1;
    if (!buf || cap < text.size() + 1) return fail(MAOBO_ERR_BUFFER_TOO_SMALL, "buffer too small");
    std::memcpy(buf, text.c_str(), text.size() + 1);
    return MAOBO_OK;
  });
}

MAOBO_API maobo_status maobo_experiment_run(maobo_experiment* exp, maobo_run_summary* out) {
  MAOBO_REQUIRE(exp, "null experiment");
  return guarded([&] {
    const auto r = maobo::run_single(exp->config, output_dir(exp));
    if (out) {
      out->hypervolume = r.recommendation.hypervolume;
      out->reductions = r.reductions.size();
      out->front_size = r.recommendation.indices.size();
      size_t saved = 0;
      for (size_t e : r.evaluations) saved += r.config.iterations - e;
      out->evaluations_saved = saved;
    }
    return MAOBO_OK;
  });
}

MAOBO_API maobo_status maobo_experiment_sweep(maobo_experiment* exp, maobo_sweep_summary* out) {
  MAOBO_REQUIRE(exp, "null experiment");
  return guarded([&] {
    const auto report = maobo::run_sweep(exp->config, output_dir(exp));
    size_t failed = 0;
    std::string first;
    for (const auto& c : report.cells) {
      if (c.ok) continue;
      if (!failed) first = c.spec.id() + ": " + c.error;
      ++failed;
    }
    if (out) *out = {report.cells.size(), failed};
    if (failed)
      return fail(MAOBO_ERR_RUN_FAILED, std::to_string(failed) + " of " + std::to_string(report.cells.size()) +
                                            " cells failed; first: " + first);
    return MAOBO_OK;
  });
}

MAOBO_API maobo_status maobo_experiment_study(maobo_experiment* exp) {
  MAOBO_REQUIRE(exp, "null experiment");
  return guarded([&] {
    exp->study = maobo::run_similarity_study(exp->config.study, exp->config.run.similarity, exp->config.run.kernel);
    exp->labels.clear();
    for (const auto& p : exp->study->pairs) {
      exp->labels.push_back(p.pair.f.id());
      exp->labels.push_back(p.pair.g.id());
    }
    maobo::write_study(*exp->study, output_dir(exp));
    return MAOBO_OK;
  });
}

MAOBO_API size_t maobo_experiment_study_pairs(const maobo_experiment* exp) {
  return exp && exp->study ? exp->study->pairs.size() : 0;
}

MAOBO_API maobo_status maobo_experiment_study_pair(const maobo_experiment* exp, size_t index, const char** f,
                                                   const char** g, double* mean, double* sd) {
  MAOBO_REQUIRE(exp && exp->study, "no study results");
  MAOBO_REQUIRE(index < exp->study->pairs.size(), "pair index out of range");
  if (f) *f = exp->labels[2 * index].c_str();
  if (g) *g = exp->labels[2 * index + 1].c_str();
  if (mean) *mean = exp->study->pairs[index].mean;
  if (sd) *sd = exp->study->pairs[index].sd;
  return MAOBO_OK;
}

MAOBO_API maobo_status maobo_plotdata(const char* in_dir, const char* out_dir, size_t* files_written) {
  MAOBO_REQUIRE(in_dir && out_dir, "null directory");
  return guarded([&] {
    const auto files = maobo::emit_plotdata(in_dir, out_dir);
    if (files_written) *files_written = files.size();
    return MAOBO_OK;
  });
}

MAOBO_API maobo_status maobo_gp_fit(const double* x, size_t n, size_t d, const double* y, maobo_kernel kernel,
                                    uint64_t seed, maobo_gp** out) {
  MAOBO_REQUIRE(x && y && out && n > 0 && d > 0, "invalid training data");
  *out = nullptr;
  return guarded([&] {
    maobo::gp::FitOptions opts;
    opts.seed = seed;
    const Eigen::VectorXd yy = Eigen::Map<const Eigen::VectorXd>(y, static_cast<Eigen::Index>(n));
    *out = new maobo_gp{maobo::gp::fit_map(rows(x, n, d), yy, family_of(kernel), opts)};
    return MAOBO_OK;
  });
}

MAOBO_API maobo_status maobo_gp_create(const double* x, size_t n, size_t d, const double* y, maobo_kernel kernel,
                                       const double* lengthscales, double signal_variance,
                                       double noise_variance, maobo_gp** out) {
  MAOBO_REQUIRE(x && y && lengthscales && out && n > 0 && d > 0, "invalid model data");
  *out = nullptr;
  return guarded([&] {
    maobo::gp::KernelSpec spec;
    spec.family = family_of(kernel);
    spec.lengthscales = Eigen::Map<const Eigen::VectorXd>(lengthscales, static_cast<Eigen::Index>(d));
    spec.signal_variance = signal_variance;
    spec.noise_variance = noise_variance;
    const Eigen::VectorXd yy = Eigen::Map<const Eigen::VectorXd>(y, static_cast<Eigen::Index>(n));
    *out = new maobo_gp{maobo::gp::GpModel::assemble(rows(x, n, d), yy, spec)};
    return MAOBO_OK;
  });
}

MAOBO_API void maobo_gp_destroy(maobo_gp* gp) { delete gp; }

MAOBO_API size_t maobo_gp_dim(const maobo_gp* gp) { return gp ? gp->model.dim() : 0; }

MAOBO_API maobo_status maobo_gp_predict(const maobo_gp* gp, const double* grid, size_t m, double* mean,
                                        double* variance) {
  MAOBO_REQUIRE(gp && grid && m > 0, "invalid prediction request");
  return guarded([&] {
    const auto p = gp->model.predict(rows(grid, m, gp->model.dim()));
    for (size_t i = 0; i < m; ++i) {
      if (mean) mean[i] = p.mean[static_cast<Eigen::Index>(i)];
      if (variance) variance[i] = p.variance[static_cast<Eigen::Index>(i)];
    }
    return MAOBO_OK;
  });
}

MAOBO_API maobo_status maobo_gp_log_marginal(const maobo_gp* gp, double* out) {
  MAOBO_REQUIRE(gp && out, "null argument");
  return guarded([&] {
    *out = gp->model.log_marginal();
    return MAOBO_OK;
  });
}

MAOBO_API maobo_status maobo_gp_log_marginal_grad(const maobo_gp* gp, double* out) {
  MAOBO_REQUIRE(gp && out, "null argument");
  return guarded([&] {
    const Eigen::VectorXd g = gp->model.log_marginal_grad();
    for (Eigen::Index i = 0; i < g.size(); ++i) out[i] = g[i];
    return MAOBO_OK;
  });
}

MAOBO_API maobo_status maobo_gp_hyperparameters(const maobo_gp* gp, double* lengthscales,
                                                double* signal_variance, double* noise_variance) {
  MAOBO_REQUIRE(gp, "null model");
  const auto& k = gp->model.kernel();
  if (lengthscales)
    for (Eigen::Index i = 0; i < k.lengthscales.size(); ++i) lengthscales[i] = k.lengthscales[i];
  if (signal_variance) *signal_variance = k.signal_variance;
  if (noise_variance) *noise_variance = k.noise_variance;
  return MAOBO_OK;
}

MAOBO_API void maobo_similarity_options_default(maobo_similarity_options* opts) {
  if (!opts) return;
  const maobo::similarity::SimilarityConfig d;
  opts->eps1 = d.eps1;
  opts->eps2 = d.eps2;
  opts->d1_mode = MAOBO_D1_AVG_RELATIVE;
  opts->p = d.p;
  opts->delta_tol = d.delta_tol;
  opts->d2_mode = MAOBO_D2_FROBENIUS;
}

MAOBO_API maobo_status maobo_gp_distance(const maobo_gp* f, const maobo_gp* g, const double* grid, size_t m,
                                         const maobo_similarity_options* opts, maobo_similarity_report* out) {
  MAOBO_REQUIRE(f && g && grid && out && m > 0, "invalid distance request");
  return guarded([&] {
    namespace sim = maobo::similarity;
    sim::SimilarityConfig cfg;
    if (opts) {
      cfg.eps1 = opts->eps1;
      cfg.eps2 = opts->eps2;
      switch (opts->d1_mode) {
        case MAOBO_D1_AVG_RELATIVE: cfg.d1_mode = sim::MeanDistanceMode::AvgRelativeDistance; break;
        case MAOBO_D1_PNORM: cfg.d1_mode = sim::MeanDistanceMode::PNorm; break;
        case MAOBO_D1_COUNT: cfg.d1_mode = sim::MeanDistanceMode::CountExceeding; break;
        case MAOBO_D1_FRACTION: cfg.d1_mode = sim::MeanDistanceMode::FractionExceeding; break;
        default: throw maobo::InvalidInput("unknown mean distance mode");
      }
      cfg.p = opts->p;
      cfg.delta_tol = opts->delta_tol;
      cfg.d2_mode = opts->d2_mode == MAOBO_D2_NONE ? sim::CovDistanceMode::None : sim::CovDistanceMode::FrobeniusEntrywise;
    }
    cfg.validate();
    if (f->model.dim() != g->model.dim()) throw maobo::DimensionMismatch("models differ in input dimension");
    auto shared = std::make_shared<const Eigen::MatrixXd>(rows(grid, m, f->model.dim()));
    const auto r = sim::gp_distance(f->model.predict(shared), g->model.predict(shared), cfg);
    *out = {r.total, r.s1, r.s2, r.s3, r.d1, r.d2, r.affine.a, r.affine.b, r.rho};
    return MAOBO_OK;
  });
}

MAOBO_API maobo_status maobo_hypervolume(const double* points, size_t n, size_t k, const double* ref,
                                         double* out) {
  MAOBO_REQUIRE(points && ref && out && k > 0, "invalid hypervolume request");
  return guarded([&] {
    *out = maobo::pareto::hypervolume(rows(points, n, k),
                                      Eigen::Map<const Eigen::VectorXd>(ref, static_cast<Eigen::Index>(k)));
    return MAOBO_OK;
  });
}

MAOBO_API maobo_status maobo_pareto_front(const double* points, size_t n, size_t k, size_t* indices,
                                          size_t* count) {
  MAOBO_REQUIRE(points && indices && count && k > 0, "invalid front request");
  return guarded([&] {
    const auto idx = maobo::pareto::pareto_front(rows(points, n, k));
    std::copy(idx.begin(), idx.end(), indices);
    *count = idx.size();
    return MAOBO_OK;
  });
}

MAOBO_API maobo_status maobo_benchmark_eval(const char* name, const double* x, size_t d, double* out) {
  MAOBO_REQUIRE(name && x && out, "null argument");
  return guarded([&] {
    const auto fn = maobo::bench::parse_benchmark(name);
    if (fn.dim != d) throw maobo::DimensionMismatch(fn.name + " takes " + std::to_string(fn.dim) + " inputs");
    *out = fn(Eigen::Map<const Eigen::VectorXd>(x, static_cast<Eigen::Index>(d)));
    return MAOBO_OK;
  });
}

}  // extern "C"
