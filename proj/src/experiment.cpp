#include "maobo/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "maobo/errors.hpp"
#include "maobo/log.hpp"
#include "maobo/trace_io.hpp"

namespace maobo {

namespace {

void apply_reference(RunResult& r, const bench::Problem& problem, const Eigen::VectorXd& ref) {
  auto& rec = r.recommendation;
  if (rec.front.points.rows() == 0) rec.front.points = problem.evaluate_rows(rec.front.inputs);
  rec.front.ref = ref;
  rec.hypervolume = pareto::hypervolume(rec.front);
}

}  // namespace

std::string CellSpec::id() const {
  if (baseline) return "baseline-seed" + std::to_string(seed);
  return "d" + std::to_string(delta_start) + "-e" + bench::format_double(epsilon) + "-seed" + std::to_string(seed);
}

bool ExperimentReport::all_ok() const {
  for (const auto& c : cells)
    if (!c.ok) return false;
  return true;
}

std::vector<CellSpec> sweep_cells(const ExperimentConfig& config) {
  std::vector<CellSpec> cells;
  const bool reduce = config.run.reduction;
  if (config.sweep.baseline || !reduce)
    for (auto seed : config.sweep.seeds) cells.push_back({true, config.run.delta_start, config.run.epsilon, seed});
  if (!reduce) return cells;
  for (auto d : config.sweep.delta_start)
    for (auto e : config.sweep.epsilon)
      for (auto seed : config.sweep.seeds) cells.push_back({false, d, e, seed});
  return cells;
}

RunConfig cell_run_config(const ExperimentConfig& config, const CellSpec& cell) {
  RunConfig rc = config.run;
  rc.seed = cell.seed;
  rc.delta_start = cell.delta_start;
  rc.epsilon = cell.epsilon;
  rc.reduction = !cell.baseline;
  return rc;
}

std::size_t pool_size(std::size_t cells) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MAOBO_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) {
      n = static_cast<std::size_t>(v);
    } else {
      log::warn("ignoring invalid MAOBO_THREADS value '" + std::string(env) + "'");
    }
  }
  return std::max<std::size_t>(1, std::min(n, cells));
}

ExperimentReport execute_sweep(const ExperimentConfig& config) {
  config.require_problem();
  const bench::Problem problem(config.run.problem);
  ExperimentReport report;
  for (const auto& spec : sweep_cells(config)) report.cells.push_back({spec, false, {}, std::nullopt, 0.0});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < report.cells.size(); i = next++) {
      CellResult& cell = report.cells[i];
      try {
        cell.result = run(cell_run_config(config, cell.spec));
        cell.ok = true;
        log::info("cell " + cell.spec.id() + " done");
      } catch (const std::exception& e) {
        cell.error = e.what();
        log::warn("cell " + cell.spec.id() + " failed: " + cell.error);
      }
    }
  };
  const std::size_t workers = pool_size(report.cells.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (config.run.reference) {
    report.reference = *config.run.reference;
  } else {
    Eigen::MatrixXd all(0, static_cast<Eigen::Index>(problem.num_objectives()));
    for (const auto& c : report.cells) {
      if (!c.ok) continue;
      const Eigen::MatrixXd v = problem.evaluate_rows(c.result->data.x);
      all.conservativeResize(all.rows() + v.rows(), Eigen::NoChange);
      all.bottomRows(v.rows()) = v;
    }
    if (all.rows() > 0) report.reference = default_reference(all);
  }

  if (report.reference.size() > 0)
    for (auto& c : report.cells)
      if (c.ok) apply_reference(*c.result, problem, report.reference);

  for (auto& c : report.cells) {
    c.relative_gap = std::numeric_limits<double>::quiet_NaN();
    if (!c.ok || c.spec.baseline) continue;
    for (const auto& b : report.cells) {
      if (b.ok && b.spec.baseline && b.spec.seed == c.spec.seed) {
        const double h = b.result->recommendation.hypervolume;
        if (h > 0.0) c.relative_gap = std::abs(h - c.result->recommendation.hypervolume) / h;
      }
    }
  }
  return report;
}

std::string table_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "cell,mode,delta_start,epsilon,seed,status,hypervolume,reduction_iterations,removed_objectives,"
         "relative_gap\n";
  for (const auto& c : report.cells) {
    out << c.spec.id() << "," << (c.spec.baseline ? "baseline" : "reduction") << ",";
    if (!c.spec.baseline) out << c.spec.delta_start;
    out << ",";
    if (!c.spec.baseline) out << bench::format_double(c.spec.epsilon);
    out << "," << c.spec.seed << "," << (c.ok ? "ok" : "failed") << ",";
    if (c.ok) {
      out << bench::format_double(c.result->recommendation.hypervolume);
      std::string iters, removed;
      for (const auto& r : c.result->reductions) {
        if (!iters.empty()) {
          iters += ";";
          removed += ";";
        }
        iters += std::to_string(r.iteration);
        removed += std::to_string(r.removed);
      }
      out << "," << iters << "," << removed << ",";
      if (!std::isnan(c.relative_gap)) out << bench::format_double(c.relative_gap);
    } else {
      out << ",,,";
    }
    out << "\n";
  }
  return out.str();
}

ExperimentReport run_sweep(const ExperimentConfig& config, const std::filesystem::path& out) {
  ExperimentReport report = execute_sweep(config);
  for (const auto& c : report.cells) {
    const auto dir = out / c.spec.id();
    if (c.ok) {
      io::write_run_artifacts(*c.result, dir);
    } else {
      io::write_text_atomic(dir / "error.txt", c.error + "\n");
    }
  }
  io::write_text_atomic(out / "table.csv", table_csv(report));
  return report;
}

RunResult run_single(const ExperimentConfig& config, const std::filesystem::path& out) {
  config.require_problem();
  RunResult result = run(config.run);
  io::write_run_artifacts(result, out);
  return result;
}

}  // namespace maobo
