#include "maobo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <utility>

#include "maobo/errors.hpp"
#include "maobo/log.hpp"
#include "maobo/sobol.hpp"

namespace maobo {

namespace {

constexpr double kAugmentation = 0.05;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool same_reference(const std::optional<Eigen::VectorXd>& a, const std::optional<Eigen::VectorXd>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->size() == b->size() && *a == *b;
}

Eigen::VectorXd noise_draw(const RunConfig& config, std::size_t row, const Eigen::VectorXd& sd) {
  Rng rng(derive_seed(config.seed, stream::kNoise, row));
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(sd.size());
  for (Eigen::Index j = 0; j < sd.size(); ++j) z[j] = normal(rng);
  return (sd.array() * z.array()).matrix();
}

Eigen::MatrixXd active_columns(const Eigen::MatrixXd& y, const std::vector<std::size_t>& active) {
  Eigen::MatrixXd out(y.rows(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t a = 0; a < active.size(); ++a)
    out.col(static_cast<Eigen::Index>(a)) = y.col(static_cast<Eigen::Index>(active[a]));
  return out;
}

std::string at_iteration(std::size_t t, const std::string& what) {
  return "iteration " + std::to_string(t) + ": " + what;
}

}  // namespace

void RunConfig::validate() const {
  problem.validate();
  if (n_init < 2) throw InvalidInput("n_init must be at least 2");
  if (iterations < n_init) throw InvalidInput("iterations must be at least n_init");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidInput("epsilon must lie in [0, 1]");
  if (acquisition.candidates == 0) throw InvalidInput("acquisition candidates must be positive");
  if (acquisition.samples == 0) throw InvalidInput("acquisition samples must be positive");
  if (restarts == 0) throw InvalidInput("restarts must be positive");
  if (grid_per_dim == 0) throw InvalidInput("grid_per_dim must be positive");
  similarity.validate();
  if (reference) {
    if (static_cast<std::size_t>(reference->size()) != problem.objectives.size())
      throw DimensionMismatch("reference point length differs from the objective count");
    if (!reference->allFinite()) throw InvalidInput("reference point must be finite");
  }
}

bool RunConfig::operator==(const RunConfig& o) const {
  return problem == o.problem && iterations == o.iterations && n_init == o.n_init &&
         delta_start == o.delta_start && epsilon == o.epsilon && reduction == o.reduction &&
         similarity == o.similarity && same_reference(reference, o.reference) && seed == o.seed &&
         acquisition == o.acquisition && kernel == o.kernel && proxy_removed == o.proxy_removed &&
         restarts == o.restarts &&
         grid_per_dim == o.grid_per_dim;
}

void Dataset::append(const Eigen::VectorXd& xi, const Eigen::VectorXd& yi) {
  if (x.rows() > 0 && (xi.size() != x.cols() || yi.size() != y.cols()))
    throw DimensionMismatch("appended row does not match dataset shape");
  const Eigen::Index n = x.rows();
  x.conservativeResize(n + 1, xi.size());
  y.conservativeResize(n + 1, yi.size());
  x.row(n) = xi.transpose();
  y.row(n) = yi.transpose();
}

Dataset initial_design(const RunConfig& config, const bench::Problem& problem, Eigen::VectorXd& noise_sd) {
  if (config.n_init < 2) throw InvalidInput("n_init must be at least 2");
  Dataset data;
  data.x = sobol_in_box(problem.box(), config.n_init, derive_seed(config.seed, stream::kInitialDesign, 0));
  const Eigen::MatrixXd clean = problem.evaluate_rows(data.x);
  if (!clean.allFinite()) throw NumericalError("initial design: an objective returned a non-finite value");

  const auto k = static_cast<Eigen::Index>(problem.num_objectives());
  if (problem.spec().noise) {
    noise_sd = Eigen::VectorXd::Constant(k, *problem.spec().noise);
  } else {
    noise_sd = 0.01 * (clean.colwise().maxCoeff() - clean.colwise().minCoeff()).transpose();
  }

  data.y = clean;
  for (Eigen::Index r = 0; r < clean.rows(); ++r)
    data.y.row(r) += noise_draw(config, static_cast<std::size_t>(r) + 1, noise_sd).transpose();
  return data;
}

double scalarize_chebyshev(const Eigen::VectorXd& normalized, const Eigen::VectorXd& weights,
                           double augmentation) {
  if (normalized.size() != weights.size()) throw DimensionMismatch("weights and values differ in length");
  if (normalized.size() == 0) throw InvalidInput("empty objective vector");
  const Eigen::ArrayXd wy = weights.array() * normalized.array();
  return wy.maxCoeff() + augmentation * wy.sum();
}

Eigen::VectorXd sample_simplex(std::size_t k, Rng& rng) {
  if (k == 0) throw InvalidInput("simplex dimension must be positive");
  std::exponential_distribution<double> expo(1.0);
  Eigen::VectorXd w(static_cast<Eigen::Index>(k));
  for (auto& v : w) v = expo(rng);
  const double total = w.sum();
  if (!(total > 0.0)) return Eigen::VectorXd::Constant(w.size(), 1.0 / static_cast<double>(k));
  return w / total;
}

AcquisitionChoice choose_candidate(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& variance,
                                   const Eigen::MatrixXd& observed, const Eigen::VectorXd& weights,
                                   std::size_t samples, Rng& rng) {
  if (samples == 0) throw InvalidInput("empty acquisition inputs");
  std::normal_distribution<double> normal;
  Eigen::MatrixXd normals(static_cast<Eigen::Index>(samples), mean.cols());
  for (Eigen::Index r = 0; r < normals.rows(); ++r)
    for (Eigen::Index j = 0; j < normals.cols(); ++j) normals(r, j) = normal(rng);
  return choose_candidate(mean, variance, observed, weights, normals);
}

AcquisitionChoice choose_candidate(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& variance,
                                   const Eigen::MatrixXd& observed, const Eigen::VectorXd& weights,
                                   const Eigen::MatrixXd& normals) {
  const Eigen::Index g = mean.rows();
  const Eigen::Index k = mean.cols();
  if (variance.rows() != g || variance.cols() != k || observed.cols() != k || weights.size() != k ||
      normals.cols() != k)
    throw DimensionMismatch("acquisition inputs disagree on the objective count");
  if (g == 0 || observed.rows() == 0 || normals.rows() == 0) throw InvalidInput("empty acquisition inputs");
  const Eigen::Index samples = normals.rows();

  const Eigen::VectorXd lo = observed.colwise().minCoeff().transpose();
  const Eigen::VectorXd hi = observed.colwise().maxCoeff().transpose();
  Eigen::VectorXd inv_range(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double r = hi[j] - lo[j];
    inv_range[j] = (r > 0.0 && std::isfinite(r)) ? 1.0 / r : 0.0;  // degenerate range: objective reads 0
  }
  auto normalize = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return ((y - lo).array() * inv_range.array()).matrix();
  };

  double incumbent = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < observed.rows(); ++r)
    incumbent = std::min(incumbent, scalarize_chebyshev(normalize(observed.row(r).transpose()), weights));

  AcquisitionChoice best;
  best.weights = weights;
  double best_value = 0.0;
  bool found = false;
  Eigen::VectorXd draw(k);
  const Eigen::MatrixXd sd = variance.cwiseMax(0.0).cwiseSqrt();
  for (Eigen::Index c = 0; c < g; ++c) {
    double total = 0.0;
    for (Eigen::Index s = 0; s < samples; ++s) {
      for (Eigen::Index j = 0; j < k; ++j) draw[j] = mean(c, j) + sd(c, j) * normals(s, j);
      total += std::max(0.0, incumbent - scalarize_chebyshev(normalize(draw), weights));
    }
    const double ei = total / static_cast<double>(samples);
    if (ei > best_value) {
      best_value = ei;
      best.index = static_cast<std::size_t>(c);
      found = true;
    }
  }
  best.value = best_value;
  best.fallback = !found;
  return best;
}

std::vector<gp::GpModel> fit_models(const OptState& state, const RunConfig& config) {
  const std::size_t t = state.iteration + 1;
  std::vector<gp::GpModel> models;
  models.reserve(state.active.size());
  for (std::size_t j : state.active) {
    const Eigen::VectorXd y = state.data.y.col(static_cast<Eigen::Index>(j));
    if (!y.allFinite()) throw InvalidInput(at_iteration(t, "active objective has missing observations"));
    gp::FitOptions opts;
    opts.restarts = static_cast<int>(config.restarts);
    opts.seed = derive_seed(config.seed, stream::kGpFit, t * 1024 + j);
    try {
      models.push_back(gp::fit_map(state.data.x, y, config.kernel, opts));
    } catch (const NumericalError& e) {
      throw NumericalError(at_iteration(t, "objective " + std::to_string(j) + ": " + e.what()));
    }
  }
  return models;
}

AffineLink resolve_removed(const std::vector<Removal>& reductions, std::size_t objective) {
  AffineLink link{objective, 1.0, 0.0};
  for (bool moved = true; moved;) {
    moved = false;
    for (const auto& r : reductions) {
      if (r.removed != link.root) continue;
      // f_root ~ slope * f_kept + intercept
      link = {r.kept, link.slope * r.slope, link.slope * r.intercept + link.intercept};
      moved = true;
    }
  }
  return link;
}

Eigen::VectorXd propose_next(const OptState& state, const RunConfig& config, const Box& box,
                             AcquisitionChoice* choice) {
  if (state.models.size() != state.active.size() || state.active.empty())
    throw InvalidInput("models must be fitted for every active objective");
  const std::size_t t = state.iteration + 1;
  const Eigen::MatrixXd candidates =
      sobol_in_box(box, config.acquisition.candidates, derive_seed(config.seed, stream::kCandidates, t));

  const auto k = static_cast<Eigen::Index>(state.active.size());
  const auto k_full = static_cast<Eigen::Index>(state.data.y.cols());
  Eigen::MatrixXd mean(candidates.rows(), k);
  Eigen::MatrixXd var(candidates.rows(), k);
  for (Eigen::Index a = 0; a < k; ++a) {
    const gp::PredictiveSummary p = state.models[static_cast<std::size_t>(a)].predict(candidates);
    mean.col(a) = p.mean;
    var.col(a) = p.variance;
  }

  Rng rng(derive_seed(config.seed, stream::kAcquisition, t));
  const Eigen::VectorXd w_full = sample_simplex(static_cast<std::size_t>(k_full), rng);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd z_full(static_cast<Eigen::Index>(config.acquisition.samples), k_full);
  for (Eigen::Index r = 0; r < z_full.rows(); ++r)
    for (Eigen::Index j = 0; j < k_full; ++j) z_full(r, j) = normal(rng);

  std::vector<Eigen::Index> slot(static_cast<std::size_t>(k_full), -1);
  for (Eigen::Index a = 0; a < k; ++a) slot[state.active[static_cast<std::size_t>(a)]] = a;

  AcquisitionChoice picked;
  if (config.proxy_removed) {
    Eigen::MatrixXd m(candidates.rows(), k_full), v(candidates.rows(), k_full), z(z_full.rows(), k_full);
    Eigen::MatrixXd observed = state.data.y;
    for (Eigen::Index j = 0; j < k_full; ++j) {
      const AffineLink l = resolve_removed(state.reductions, static_cast<std::size_t>(j));
      const Eigen::Index a = slot[l.root];
      const auto root = static_cast<Eigen::Index>(l.root);
      m.col(j) = (l.slope * mean.col(a).array() + l.intercept).matrix();
      v.col(j) = l.slope * l.slope * var.col(a);
      z.col(j) = z_full.col(root);
      for (Eigen::Index r = 0; r < observed.rows(); ++r)
        if (!std::isfinite(observed(r, j))) observed(r, j) = l.slope * state.data.y(r, root) + l.intercept;
    }
    picked = choose_candidate(m, v, observed, w_full, z);
  } else {
    Eigen::VectorXd w(k);
    Eigen::MatrixXd z(z_full.rows(), k);
    for (Eigen::Index a = 0; a < k; ++a) {
      const auto j = static_cast<Eigen::Index>(state.active[static_cast<std::size_t>(a)]);
      w[a] = w_full[j];
      z.col(a) = z_full.col(j);
    }
    w /= w.sum();
    picked = choose_candidate(mean, var, active_columns(state.data.y, state.active), w, z);
  }

  Eigen::VectorXd x;
  if (picked.fallback) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    x.resize(static_cast<Eigen::Index>(box.dim()));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = box.lower[i] + unif(rng) * (box.upper[i] - box.lower[i]);
    log::info(at_iteration(t, "acquisition is zero everywhere; random exploration point"));
  } else {
    x = candidates.row(static_cast<Eigen::Index>(picked.index)).transpose();
  }
  if (choice) *choice = std::move(picked);
  return x;
}

std::optional<Removal> reduce_objectives(OptState& state, const RunConfig& config,
                                         const std::shared_ptr<const Eigen::MatrixXd>& grid,
                                         std::vector<PairDistance>* distances) {
  if (state.active.size() < 2) return std::nullopt;
  if (state.models.size() != state.active.size())
    throw InvalidInput("models must be fitted for every active objective");

  std::vector<gp::PredictiveSummary> summaries;
  summaries.reserve(state.models.size());
  for (const auto& m : state.models) summaries.push_back(m.predict(grid));

  std::vector<PairDistance> pairs;
  std::optional<std::pair<std::size_t, std::size_t>> hit;
  double hit_distance = 0.0, pairs_slope = 1.0, pairs_intercept = 0.0;
  for (std::size_t a = 0; a < summaries.size(); ++a) {
    for (std::size_t b = a + 1; b < summaries.size(); ++b) {
      PairDistance pd;
      pd.i = state.active[a];
      pd.j = state.active[b];
      pd.report = similarity::gp_distance(summaries[a], summaries[b], config.similarity);
      if (!hit && pd.report.total < config.epsilon) {
        hit = std::make_pair(a, b);
        hit_distance = pd.report.total;
        pairs_slope = pd.report.affine.a;
        pairs_intercept = pd.report.affine.b;
      }
      pairs.push_back(std::move(pd));
    }
  }
  if (distances) *distances = std::move(pairs);
  if (!hit) return std::nullopt;

  Removal removal;
  removal.iteration = state.iteration;
  removal.kept = state.active[hit->first];
  removal.removed = state.active[hit->second];
  removal.distance = hit_distance;
  removal.slope = pairs_slope;
  removal.intercept = pairs_intercept;
  state.active.erase(state.active.begin() + static_cast<std::ptrdiff_t>(hit->second));
  state.models.erase(state.models.begin() + static_cast<std::ptrdiff_t>(hit->second));
  state.reductions.push_back(removal);

  std::ostringstream msg;
  msg << "iteration " << removal.iteration << ": objective " << removal.removed << " removed (kept "
      << removal.kept << ", distance " << removal.distance << ")";
  log::info(msg.str());
  return removal;
}

Eigen::VectorXd default_reference(const Eigen::MatrixXd& values) {
  if (values.rows() == 0) throw InvalidInput("no values for a reference point");
  const Eigen::VectorXd hi = values.colwise().maxCoeff().transpose();
  const Eigen::VectorXd lo = values.colwise().minCoeff().transpose();
  Eigen::VectorXd ref(hi.size());
  for (Eigen::Index j = 0; j < hi.size(); ++j) {
    const double range = hi[j] - lo[j];
    ref[j] = hi[j] + (range > 0.0 ? 0.1 * range : 1.0);
  }
  return ref;
}

Recommendation recommend(const OptState& state, const bench::Problem& problem,
                         const std::optional<Eigen::VectorXd>& reference) {
  if (state.data.size() == 0) throw InvalidInput("no observations to recommend from");
  Recommendation rec;
  const Eigen::MatrixXd observed = active_columns(state.data.y, state.active);
  // exact duplicates collapse onto their first occurrence
  for (std::size_t i : pareto::pareto_front(observed)) {
    const bool repeat = std::any_of(rec.indices.begin(), rec.indices.end(), [&](std::size_t k) {
      return observed.row(static_cast<Eigen::Index>(k)) == observed.row(static_cast<Eigen::Index>(i));
    });
    if (!repeat) rec.indices.push_back(i);
  }

  const auto n = static_cast<Eigen::Index>(rec.indices.size());
  rec.front.inputs.resize(n, state.data.x.cols());
  for (Eigen::Index r = 0; r < n; ++r)
    rec.front.inputs.row(r) = state.data.x.row(static_cast<Eigen::Index>(rec.indices[static_cast<std::size_t>(r)]));
  rec.front.points = problem.evaluate_rows(rec.front.inputs);
  rec.front.ref = reference ? *reference : default_reference(problem.evaluate_rows(state.data.x));
  rec.hypervolume = pareto::hypervolume(rec.front);
  return rec;
}

ManyObjectiveOptimizer::ManyObjectiveOptimizer(RunConfig config)
    : config_(std::move(config)), problem_((config_.validate(), config_.problem)) {
  if (config_.delta_start > config_.iterations)
    log::info("delta_start exceeds the iteration budget; reduction never runs");
  state_.data = initial_design(config_, problem_, noise_sd_);
  state_.iteration = config_.n_init;
  for (std::size_t j = 0; j < problem_.num_objectives(); ++j) state_.active.push_back(j);
  evaluations_.assign(problem_.num_objectives(), config_.n_init);
  grid_ = std::make_shared<const Eigen::MatrixXd>(
      sobol_in_box(problem_.box(), config_.grid_per_dim * problem_.dim(),
                   derive_seed(config_.seed, stream::kProbeGrid, 0)));
}

const IterationRecord& ManyObjectiveOptimizer::step() {
  if (done()) throw InvalidInput("iteration budget exhausted");
  const std::size_t t = state_.iteration + 1;

  IterationRecord rec;
  rec.iteration = t;
  state_.models = fit_models(state_, config_);
  for (std::size_t a = 0; a < state_.active.size(); ++a) {
    const auto& m = state_.models[a];
    rec.models.push_back({state_.active[a], m.kernel(), m.y_offset(), m.y_scale()});
  }

  rec.x = propose_next(state_, config_, problem_.box(), &rec.acquisition);

  // only active objectives are evaluated; the noise draw covers every objective
  // so runs that differ only in reductions share their noise stream
  const Eigen::VectorXd noise = noise_draw(config_, t, noise_sd_);
  rec.y = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(problem_.num_objectives()), kNan);
  for (std::size_t j : state_.active) {
    const auto jj = static_cast<Eigen::Index>(j);
    rec.y[jj] = problem_.evaluate(j, rec.x) + noise[jj];
    if (!std::isfinite(rec.y[jj]))
      throw NumericalError(at_iteration(t, "objective " + std::to_string(j) + " returned a non-finite value"));
    ++evaluations_[j];
  }
  rec.evaluated = state_.active;
  state_.data.append(rec.x, rec.y);
  state_.iteration = t;

  if (config_.reduction && t >= config_.delta_start && state_.active.size() >= 2)
    rec.removal = reduce_objectives(state_, config_, grid_, &rec.distances);

  if (log::level() >= log::Level::Info) {
    std::ostringstream msg;
    msg << "iteration " << t << ": x = " << rec.x.transpose() << ", " << rec.evaluated.size()
        << " objectives evaluated, EI " << rec.acquisition.value;
    log::info(msg.str());
  }
  trace_.push_back(std::move(rec));
  return trace_.back();
}

RunResult ManyObjectiveOptimizer::finish() const {
  RunResult result;
  result.config = config_;
  result.data = state_.data;
  result.noise_sd = noise_sd_;
  result.trace = trace_;
  result.reductions = state_.reductions;
  result.final_active = state_.active;
  result.evaluations = evaluations_;
  result.recommendation = recommend(state_, problem_, config_.reference);
  return result;
}

RunResult run(const RunConfig& config) {
  ManyObjectiveOptimizer opt(config);
  while (!opt.done()) opt.step();
  return opt.finish();
}

}  // namespace maobo
