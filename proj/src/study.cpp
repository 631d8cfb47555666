#include "maobo/study.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include "maobo/errors.hpp"
#include "maobo/log.hpp"
#include "maobo/random.hpp"
#include "maobo/sobol.hpp"
#include "maobo/trace_io.hpp"

namespace maobo {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string box_key(const Box& b) {
  std::string out;
  for (std::size_t i = 0; i < b.dim(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out += bench::format_double(b.lower[ii]) + ":" + bench::format_double(b.upper[ii]) + ";";
  }
  return out;
}

json vec(const Eigen::VectorXd& v) { return json(std::vector<double>(v.begin(), v.end())); }

}  // namespace

std::vector<StudyPair> default_study_pairs() {
  using bench::parse_benchmark;
  const double pi = std::numbers::pi;
  auto pair = [](const std::string& f, const std::string& g, Box box) {
    return StudyPair{parse_benchmark(f), parse_benchmark(g), std::move(box)};
  };
  return {
      pair("michalewicz1d{m=50}", "michalewicz1d{m=100}", Box::cube(1, 0.0, pi)),
      pair("michalewicz1d{m=100}", "parabola", Box::cube(1, 0.0, pi)),
      pair("sphere", "ellipsoid", Box::cube(2, -5.0, 5.0)),
      pair("ellipsoid", "styblinski_tang", Box::cube(2, -5.0, 5.0)),
      pair("griewank", "levy", Box::cube(2, -5.0, 5.0)),
      pair("ackley{a=70}", "ackley{a=100}", Box::cube(2, -5.0, 5.0)),
      pair("ackley{c=pi}", "ackley{c=6pi}", Box::cube(2, -1.0, 1.0)),
  };
}

Eigen::MatrixXd study_design(const Box& box, std::size_t samples, std::uint64_t seed) {
  return sobol_in_box(box, samples, derive_seed(seed, stream::kStudyDesign, 0));
}

Eigen::MatrixXd study_grid(const Box& box, std::size_t grid_per_dim, std::uint64_t seed) {
  return sobol_in_box(box, grid_per_dim * box.dim(), derive_seed(seed, stream::kProbeGrid, 0));
}

StudyResult run_similarity_study(const StudyConfig& config, const similarity::SimilarityConfig& sim,
                                 gp::KernelFamily kernel) {
  sim.validate();
  if (config.seeds.empty()) throw InvalidInput("study needs at least one seed");
  if (config.samples < 2) throw InvalidInput("study needs at least two samples per function");

  StudyResult result;
  result.config = config;
  result.similarity = sim;
  result.kernel = kernel;
  const std::vector<StudyPair> pairs = config.pairs.empty() ? default_study_pairs() : config.pairs;

  using Key = std::tuple<std::string, std::string, std::uint64_t>;
  std::map<Key, std::pair<gp::PredictiveSummary, std::size_t>> cache;
  std::map<std::pair<std::string, std::uint64_t>, std::shared_ptr<const Eigen::MatrixXd>> grids;

  auto summary_for = [&](const bench::BenchmarkFn& fn, const Box& box, std::uint64_t seed) -> const gp::PredictiveSummary& {
    const Key key{fn.id(), box_key(box), seed};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second.first;

    auto& grid = grids[{box_key(box), seed}];
    if (!grid) grid = std::make_shared<const Eigen::MatrixXd>(study_grid(box, config.grid_per_dim, seed));

    const Eigen::MatrixXd x = study_design(box, config.samples, seed);
    Eigen::VectorXd y(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) y[r] = fn(x.row(r).transpose());
    gp::FitOptions opts;
    opts.seed = derive_seed(seed, stream::kGpFit, fnv1a(fn.id() + "@" + box_key(box)));
    const gp::GpModel model = gp::fit_map(x, y, kernel, opts);
    result.fits.push_back({fn.id(), box, seed, model.kernel(), model.y_offset(), model.y_scale()});
    log::debug("study fit " + fn.id() + " seed " + std::to_string(seed));
    auto [pos, _] = cache.emplace(key, std::make_pair(model.predict(grid), result.fits.size() - 1));
    return pos->second.first;
  };

  for (const auto& p : pairs) {
    if (p.f.dim != p.box.dim() || p.g.dim != p.box.dim())
      throw DimensionMismatch("study pair " + p.f.id() + " / " + p.g.id() + " does not match its box");
    StudyPairResult pr;
    pr.pair = p;
    for (auto seed : config.seeds) {
      const auto& sf = summary_for(p.f, p.box, seed);
      const auto& sg = summary_for(p.g, p.box, seed);
      pr.seeds.push_back(seed);
      pr.reports.push_back(similarity::gp_distance(sf, sg, sim));
    }
    double sum = 0.0;
    for (const auto& r : pr.reports) sum += r.total;
    pr.mean = sum / static_cast<double>(pr.reports.size());
    double ss = 0.0;
    for (const auto& r : pr.reports) ss += (r.total - pr.mean) * (r.total - pr.mean);
    pr.sd = pr.reports.size() > 1 ? std::sqrt(ss / static_cast<double>(pr.reports.size() - 1)) : 0.0;
    log::info("study " + p.f.id() + " vs " + p.g.id() + ": " + bench::format_double(pr.mean));
    result.pairs.push_back(std::move(pr));
  }
  return result;
}

json study_to_json(const StudyResult& r) {
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    json per_seed = json::array();
    for (std::size_t s = 0; s < p.reports.size(); ++s) {
      const auto& rep = p.reports[s];
      per_seed.push_back({{"seed", p.seeds[s]},
                          {"total", rep.total},
                          {"s1", rep.s1},
                          {"s2", rep.s2},
                          {"s3", rep.s3},
                          {"d1", rep.d1},
                          {"d2", rep.d2},
                          {"a", rep.affine.a},
                          {"b", rep.affine.b},
                          {"rho", rep.rho}});
    }
    pairs.push_back({{"f", p.pair.f.id()},
                     {"g", p.pair.g.id()},
                     {"lower", vec(p.pair.box.lower)},
                     {"upper", vec(p.pair.box.upper)},
                     {"per_seed", per_seed},
                     {"mean", p.mean},
                     {"sd", p.sd}});
  }
  json fits = json::array();
  for (const auto& f : r.fits) {
    fits.push_back({{"function", f.function},
                    {"lower", vec(f.box.lower)},
                    {"upper", vec(f.box.upper)},
                    {"seed", f.seed},
                    {"family", gp::to_string(f.kernel.family)},
                    {"lengthscales", vec(f.kernel.lengthscales)},
                    {"signal_variance", f.kernel.signal_variance},
                    {"noise_variance", f.kernel.noise_variance},
                    {"y_offset", f.y_offset},
                    {"y_scale", f.y_scale}});
  }
  return {{"schema", "maobo.similarity/1"},
          {"samples", r.config.samples},
          {"grid_per_dim", r.config.grid_per_dim},
          {"seeds", r.config.seeds},
          {"kernel", gp::to_string(r.kernel)},
          {"eps1", r.similarity.eps1},
          {"eps2", r.similarity.eps2},
          {"pairs", pairs},
          {"fits", fits}};
}

std::string study_pairs_csv(const StudyResult& r) {
  std::ostringstream out;
  out << "f,g,mean,sd,min,max\n";
  for (const auto& p : r.pairs) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& rep : p.reports) {
      lo = std::min(lo, rep.total);
      hi = std::max(hi, rep.total);
    }
    out << '"' << p.pair.f.id() << "\",\"" << p.pair.g.id() << "\"," << bench::format_double(p.mean) << ","
        << bench::format_double(p.sd) << "," << bench::format_double(lo) << "," << bench::format_double(hi) << "\n";
  }
  return out.str();
}

void write_study(const StudyResult& result, const std::filesystem::path& dir) {
  io::write_text_atomic(dir / "similarity.json", study_to_json(result).dump(1) + "\n");
  io::write_text_atomic(dir / "pairs.csv", study_pairs_csv(result));
}

}  // namespace maobo
