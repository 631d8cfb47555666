#include "maobo/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "maobo/errors.hpp"

namespace maobo::io {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(const Eigen::VectorXd& v) {
  json out = json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

json mat(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vec(m.row(r).transpose()));
  return out;
}

Eigen::VectorXd to_vec(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = j[i].is_null() ? std::nan("") : j[i].get<double>();
  return v;
}

Eigen::MatrixXd to_mat(const json& j, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = to_vec(j[r]).transpose();
  return m;
}

json removal_json(const Removal& r) {
  return {{"iteration", r.iteration}, {"removed", r.removed},         {"kept", r.kept},
          {"distance", number(r.distance)}, {"slope", number(r.slope)}, {"intercept", number(r.intercept)}};
}

json pair_json(const PairDistance& p) {
  const auto& r = p.report;
  return {{"i", p.i},          {"j", p.j},         {"total", number(r.total)}, {"s1", number(r.s1)},
          {"s2", number(r.s2)}, {"s3", number(r.s3)}, {"d1", number(r.d1)},     {"d2", number(r.d2)},
          {"a", number(r.affine.a)}, {"b", number(r.affine.b)}, {"rho", number(r.rho)}};
}

json model_json(const ModelRecord& m) {
  return {{"objective", m.objective},
          {"family", gp::to_string(m.kernel.family)},
          {"lengthscales", vec(m.kernel.lengthscales)},
          {"signal_variance", m.kernel.signal_variance},
          {"noise_variance", m.kernel.noise_variance},
          {"y_offset", m.y_offset},
          {"y_scale", m.y_scale}};
}

ModelRecord model_from_json(const json& j) {
  ModelRecord m;
  m.objective = j.at("objective").get<std::size_t>();
  m.kernel.family = gp::kernel_family_from_string(j.at("family").get<std::string>());
  m.kernel.lengthscales = to_vec(j.at("lengthscales"));
  m.kernel.signal_variance = j.at("signal_variance").get<double>();
  m.kernel.noise_variance = j.at("noise_variance").get<double>();
  m.y_offset = j.at("y_offset").get<double>();
  m.y_scale = j.at("y_scale").get<double>();
  return m;
}

std::string csv_number(double v) { return std::isfinite(v) ? bench::format_double(v) : std::string(); }

}  // namespace

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp + "' to '" + path.string() + "': " + ec.message());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("missing file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json run_config_to_json(const RunConfig& c) {
  json objectives = json::array();
  for (const auto& o : c.problem.objectives) objectives.push_back(o.label());
  const auto& s = c.similarity;
  return {
      {"problem",
       {{"name", c.problem.name},
        {"objectives", objectives},
        {"lower", vec(c.problem.box.lower)},
        {"upper", vec(c.problem.box.upper)},
        {"noise", c.problem.noise ? json(*c.problem.noise) : json("auto")}}},
      {"iterations", c.iterations},
      {"n_init", c.n_init},
      {"delta_start", c.delta_start},
      {"epsilon", c.epsilon},
      {"reduction", c.reduction},
      {"seed", c.seed},
      {"candidates", c.acquisition.candidates},
      {"samples", c.acquisition.samples},
      {"kernel", gp::to_string(c.kernel)},
      {"proxy_removed", c.proxy_removed},
      {"restarts", c.restarts},
      {"grid_per_dim", c.grid_per_dim},
      {"reference", c.reference ? vec(*c.reference) : json(nullptr)},
      {"similarity",
       {{"eps1", s.eps1},
        {"eps2", s.eps2},
        {"d1", similarity::to_string(s.d1_mode)},
        {"p", std::isinf(s.p) ? json("inf") : json(s.p)},
        {"delta_tol", s.delta_tol},
        {"d2", similarity::to_string(s.d2_mode)}}},
  };
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  const json& p = j.at("problem");
  c.problem.name = p.at("name").get<std::string>();
  for (const auto& o : p.at("objectives")) c.problem.objectives.push_back(bench::parse_objective_term(o.get<std::string>()));
  c.problem.box = Box(to_vec(p.at("lower")), to_vec(p.at("upper")));
  if (!p.at("noise").is_string()) c.problem.noise = p.at("noise").get<double>();
  c.iterations = j.at("iterations").get<std::size_t>();
  c.n_init = j.at("n_init").get<std::size_t>();
  c.delta_start = j.at("delta_start").get<std::size_t>();
  c.epsilon = j.at("epsilon").get<double>();
  c.reduction = j.at("reduction").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.acquisition.candidates = j.at("candidates").get<std::size_t>();
  c.acquisition.samples = j.at("samples").get<std::size_t>();
  c.kernel = gp::kernel_family_from_string(j.at("kernel").get<std::string>());
  c.proxy_removed = j.at("proxy_removed").get<bool>();
  c.restarts = j.at("restarts").get<std::size_t>();
  c.grid_per_dim = j.at("grid_per_dim").get<std::size_t>();
  if (!j.at("reference").is_null()) c.reference = to_vec(j.at("reference"));
  const json& s = j.at("similarity");
  c.similarity.eps1 = s.at("eps1").get<double>();
  c.similarity.eps2 = s.at("eps2").get<double>();
  c.similarity.d1_mode = similarity::mean_mode_from_string(s.at("d1").get<std::string>());
  c.similarity.p = s.at("p").is_string() ? INFINITY : s.at("p").get<double>();
  c.similarity.delta_tol = s.at("delta_tol").get<double>();
  c.similarity.d2_mode = similarity::cov_mode_from_string(s.at("d2").get<std::string>());
  return c;
}

json trace_to_json(const RunResult& r) {
  const auto n0 = static_cast<Eigen::Index>(r.config.n_init);
  json iterations = json::array();
  for (const auto& it : r.trace) {
    json models = json::array();
    for (const auto& m : it.models) models.push_back(model_json(m));
    json distances = json::array();
    for (const auto& d : it.distances) distances.push_back(pair_json(d));
    iterations.push_back({
        {"t", it.iteration},
        {"x", vec(it.x)},
        {"y", vec(it.y)},
        {"evaluated", it.evaluated},
        {"models", models},
        {"acquisition",
         {{"weights", vec(it.acquisition.weights)},
          {"index", it.acquisition.index},
          {"value", number(it.acquisition.value)},
          {"fallback", it.acquisition.fallback}}},
        {"distances", distances},
        {"removal", it.removal ? removal_json(*it.removal) : json(nullptr)},
    });
  }
  json reductions = json::array();
  for (const auto& red : r.reductions) reductions.push_back(removal_json(red));
  const auto& rec = r.recommendation;
  return {
      {"schema", kTraceSchema},
      {"config", run_config_to_json(r.config)},
      {"noise_sd", vec(r.noise_sd)},
      {"initial_design", {{"x", mat(r.data.x.topRows(n0))}, {"y", mat(r.data.y.topRows(n0))}}},
      {"iterations", iterations},
      {"reductions", reductions},
      {"final_active", r.final_active},
      {"evaluations", r.evaluations},
      {"front",
       {{"indices", rec.indices},
        {"inputs", mat(rec.front.inputs)},
        {"points", mat(rec.front.points)},
        {"reference", vec(rec.front.ref)}}},
      {"hypervolume", number(rec.hypervolume)},
  };
}

json summary_to_json(const RunResult& r) {
  json reductions = json::array();
  for (const auto& red : r.reductions) reductions.push_back(removal_json(red));
  std::vector<std::size_t> saved;
  for (std::size_t e : r.evaluations) saved.push_back(r.config.iterations - e);
  std::size_t total_saved = 0;
  for (std::size_t s : saved) total_saved += s;
  return {
      {"schema", kSummarySchema},
      {"problem", r.config.problem.name},
      {"seed", r.config.seed},
      {"reduction", r.config.reduction},
      {"delta_start", r.config.delta_start},
      {"epsilon", r.config.epsilon},
      {"iterations", r.config.iterations},
      {"hypervolume", number(r.recommendation.hypervolume)},
      {"reference", vec(r.recommendation.front.ref)},
      {"front_size", r.recommendation.indices.size()},
      {"reductions", reductions},
      {"final_active", r.final_active},
      {"evaluations", r.evaluations},
      {"evaluations_saved", saved},
      {"total_evaluations_saved", total_saved},
  };
}

std::string front_csv(const RunResult& r) {
  const auto& f = r.recommendation.front;
  std::ostringstream out;
  out << "row";
  for (Eigen::Index i = 0; i < f.inputs.cols(); ++i) out << ",x" << i + 1;
  for (Eigen::Index j = 0; j < f.points.cols(); ++j) out << ",f" << j + 1;
  out << "\n";
  for (Eigen::Index k = 0; k < f.points.rows(); ++k) {
    out << r.recommendation.indices[static_cast<std::size_t>(k)];
    for (Eigen::Index i = 0; i < f.inputs.cols(); ++i) out << "," << csv_number(f.inputs(k, i));
    for (Eigen::Index j = 0; j < f.points.cols(); ++j) out << "," << csv_number(f.points(k, j));
    out << "\n";
  }
  return out.str();
}

std::string reductions_csv(const RunResult& r) {
  std::ostringstream out;
  out << "iteration,removed,kept,distance\n";
  for (const auto& red : r.reductions)
    out << red.iteration << "," << red.removed << "," << red.kept << "," << csv_number(red.distance) << "\n";
  return out.str();
}

void write_run_artifacts(const RunResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  write_text_atomic(dir / "trace.json", trace_to_json(result).dump(1) + "\n");
  write_text_atomic(dir / "front.csv", front_csv(result));
  write_text_atomic(dir / "reductions.csv", reductions_csv(result));
  write_text_atomic(dir / "summary.json", summary_to_json(result).dump(1) + "\n");
}

StoredRun read_trace(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    const json j = json::parse(text);
    if (j.at("schema").get<std::string>() != kTraceSchema)
      throw IoError("'" + path.string() + "' has an unsupported schema");
    StoredRun s;
    s.config = run_config_from_json(j.at("config"));
    const auto d = static_cast<Eigen::Index>(s.config.problem.box.dim());
    const auto k = static_cast<Eigen::Index>(s.config.problem.objectives.size());
    s.data.x = to_mat(j.at("initial_design").at("x"), d);
    s.data.y = to_mat(j.at("initial_design").at("y"), k);
    for (const auto& it : j.at("iterations")) {
      IterationRecord rec;
      rec.iteration = it.at("t").get<std::size_t>();
      rec.x = to_vec(it.at("x"));
      rec.y = to_vec(it.at("y"));
      rec.evaluated = it.at("evaluated").get<std::vector<std::size_t>>();
      for (const auto& m : it.at("models")) rec.models.push_back(model_from_json(m));
      if (!it.at("removal").is_null()) {
        const auto& r = it.at("removal");
        rec.removal = Removal{r.at("iteration").get<std::size_t>(), r.at("removed").get<std::size_t>(),
                              r.at("kept").get<std::size_t>(), r.at("distance").get<double>(),
                              r.at("slope").get<double>(), r.at("intercept").get<double>()};
      }
      s.data.append(rec.x, rec.y);
      s.iterations.push_back(std::move(rec));
    }
    s.reference = to_vec(j.at("front").at("reference"));
    return s;
  } catch (const json::exception& e) {
    throw IoError("malformed trace '" + path.string() + "': " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw IoError("malformed trace '" + path.string() + "': " + e.what());
  }
}

}  // namespace maobo::io
