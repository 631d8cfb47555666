#include "maobo/plotdata.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "maobo/errors.hpp"
#include "maobo/pareto.hpp"
#include "maobo/random.hpp"
#include "maobo/sobol.hpp"
#include "maobo/study.hpp"

namespace maobo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) { return bench::format_double(v); }

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ? c : '_';
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::string mean_csv(const Eigen::MatrixXd& grid, const gp::PredictiveSummary& p, bool with_variance) {
  std::ostringstream out;
  if (grid.cols() == 1) {
    out << "x";
  } else {
    for (Eigen::Index i = 0; i < grid.cols(); ++i) out << (i ? "," : "") << "x" << i + 1;
  }
  out << ",mean" << (with_variance ? ",variance" : "") << "\n";
  for (Eigen::Index r = 0; r < grid.rows(); ++r) {
    for (Eigen::Index i = 0; i < grid.cols(); ++i) out << (i ? "," : "") << num(grid(r, i));
    out << "," << num(p.mean[r]);
    if (with_variance) out << "," << num(p.variance[r]);
    out << "\n";
  }
  return out.str();
}

Eigen::VectorXd to_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<fs::path> run_plotdata(const fs::path& in, const fs::path& out) {
  const io::StoredRun run = io::read_trace(in / "trace.json");
  std::vector<fs::path> written;

  std::ostringstream hv;
  hv << "iteration,hypervolume\n";
  for (const auto& [t, h] : hypervolume_series(run)) hv << t << "," << num(h) << "\n";
  io::write_text_atomic(out / "hypervolume_series.csv", hv.str());
  written.push_back(out / "hypervolume_series.csv");

  const Box& box = run.config.problem.box;
  const Eigen::MatrixXd grid = sobol_in_box(box, run.config.grid_per_dim * box.dim(),
                                            derive_seed(run.config.seed, stream::kProbeGrid, 0));
  for (const auto& it : run.iterations) {
    const auto n = static_cast<Eigen::Index>(it.iteration - 1);  // models saw the rows before t
    for (const auto& m : it.models) {
      const Eigen::VectorXd y = run.data.y.col(static_cast<Eigen::Index>(m.objective)).head(n);
      const auto model = gp::GpModel::assemble(run.data.x.topRows(n), y, m.kernel, m.y_offset, m.y_scale);
      char name[64];
      std::snprintf(name, sizeof name, "t%02zu_obj%zu.csv", it.iteration, m.objective);
      const fs::path file = out / "means" / name;
      io::write_text_atomic(file, mean_csv(grid, model.predict(grid), true));
      written.push_back(file);
    }
  }
  return written;
}

std::vector<fs::path> study_plotdata(const fs::path& in, const fs::path& out) {
  const fs::path file = in / "similarity.json";
  json j;
  try {
    j = json::parse(io::read_text(file));
  } catch (const json::exception& e) {
    throw IoError("malformed '" + file.string() + "': " + e.what());
  }
  std::vector<fs::path> written;
  try {
    const auto samples = j.at("samples").get<std::size_t>();
    const auto grid_per_dim = j.at("grid_per_dim").get<std::size_t>();
    for (const auto& f : j.at("fits")) {
      const auto fn = bench::parse_benchmark(f.at("function").get<std::string>());
      const Box box(to_vec(f.at("lower")), to_vec(f.at("upper")));
      const auto seed = f.at("seed").get<std::uint64_t>();
      gp::KernelSpec k;
      k.family = gp::kernel_family_from_string(f.at("family").get<std::string>());
      k.lengthscales = to_vec(f.at("lengthscales"));
      k.signal_variance = f.at("signal_variance").get<double>();
      k.noise_variance = f.at("noise_variance").get<double>();
      const double off = f.at("y_offset").get<double>(), scale = f.at("y_scale").get<double>();

      const Eigen::MatrixXd x = study_design(box, samples, seed);
      Eigen::VectorXd y(x.rows());
      for (Eigen::Index r = 0; r < x.rows(); ++r) y[r] = fn(x.row(r).transpose());
      const auto model = gp::GpModel::assemble(x, y, k, off, scale);

      Eigen::MatrixXd grid;
      if (box.dim() == 1) {
        // sorted line for 1-D curves
        const auto m = static_cast<Eigen::Index>(grid_per_dim);
        grid = Eigen::VectorXd::LinSpaced(m, box.lower[0], box.upper[0]);
      } else {
        grid = study_grid(box, grid_per_dim, seed);
      }
      std::string box_tag;
      for (std::size_t i = 0; i < box.dim(); ++i)
        box_tag += "_" + num(box.lower[static_cast<Eigen::Index>(i)]) + "_" + num(box.upper[static_cast<Eigen::Index>(i)]);
      const fs::path path = out / "means" / (slug(fn.id()) + slug(box_tag) + "_seed" + std::to_string(seed) + ".csv");
      io::write_text_atomic(path, mean_csv(grid, model.predict(grid), false));
      written.push_back(path);
    }
  } catch (const json::exception& e) {
    throw IoError("malformed '" + file.string() + "': " + e.what());
  }
  return written;
}

}  // namespace

std::vector<std::pair<std::size_t, double>> hypervolume_series(const io::StoredRun& run) {
  const bench::Problem problem(run.config.problem);
  const Eigen::MatrixXd clean = problem.evaluate_rows(run.data.x);
  std::vector<std::pair<std::size_t, double>> series;
  for (std::size_t t = run.config.n_init; t <= run.data.size(); ++t) {
    const Eigen::MatrixXd prefix = clean.topRows(static_cast<Eigen::Index>(t));
    const auto idx = pareto::pareto_front(prefix);
    Eigen::MatrixXd front(static_cast<Eigen::Index>(idx.size()), prefix.cols());
    for (std::size_t r = 0; r < idx.size(); ++r)
      front.row(static_cast<Eigen::Index>(r)) = prefix.row(static_cast<Eigen::Index>(idx[r]));
    series.emplace_back(t, pareto::hypervolume(front, run.reference));
  }
  return series;
}

std::vector<fs::path> emit_plotdata(const fs::path& in, const fs::path& out) {
  if (fs::exists(in / "trace.json")) return run_plotdata(in, out);
  if (fs::exists(in / "similarity.json")) return study_plotdata(in, out);
  if (fs::exists(in / "table.csv")) {
    std::vector<fs::path> cells;
    for (const auto& entry : fs::directory_iterator(in))
      if (entry.is_directory() && fs::exists(entry.path() / "trace.json")) cells.push_back(entry.path());
    std::sort(cells.begin(), cells.end());
    std::vector<fs::path> written;
    for (const auto& c : cells) {
      auto w = run_plotdata(c, out / c.filename());
      written.insert(written.end(), w.begin(), w.end());
    }
    return written;
  }
  throw IoError("no trace.json, similarity.json or table.csv in '" + in.string() + "'");
}

}  // namespace maobo
