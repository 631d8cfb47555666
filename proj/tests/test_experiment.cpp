#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "maobo/errors.hpp"
#include "maobo/experiment.hpp"
#include "maobo/plotdata.hpp"
#include "maobo/study.hpp"
#include "maobo/trace_io.hpp"

using namespace maobo;
namespace fs = std::filesystem;

namespace {

const char* kSweep = R"(
[problem]
preset = branin3
[run]
iterations = 12
n_init = 5
candidates = 150
samples = 8
restarts = 2
grid_per_dim = 60
[sweep]
delta_start = 8, 10
epsilon = 0.05, 0.2
seeds = 1, 2
)";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("maobo-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("cell grid order and ids") {
  const auto cfg = parse_config(kSweep);
  const auto cells = sweep_cells(cfg);
  REQUIRE(cells.size() == 2 + 2 * 2 * 2);
  CHECK(cells[0].id() == "baseline-seed1");
  CHECK(cells[1].id() == "baseline-seed2");
  CHECK(cells[2].id() == "d8-e0.05-seed1");
  CHECK(cells[3].id() == "d8-e0.05-seed2");
  CHECK(cells[4].id() == "d8-e0.2-seed1");
  CHECK(cells.back().id() == "d10-e0.2-seed2");

  const auto base = cell_run_config(cfg, cells[0]);
  CHECK_FALSE(base.reduction);
  CHECK(base.seed == 1);
  const auto red = cell_run_config(cfg, cells.back());
  CHECK(red.reduction);
  CHECK(red.delta_start == 10);
  CHECK(red.epsilon == 0.2);
  CHECK(red.seed == 2);

  auto off = cfg;
  off.run.reduction = false;
  CHECK(sweep_cells(off).size() == 2);
  auto nobase = cfg;
  nobase.sweep.baseline = false;
  CHECK(sweep_cells(nobase).size() == 8);
}

TEST_CASE("pool size honours MAOBO_THREADS") {
  setenv("MAOBO_THREADS", "3", 1);
  CHECK(pool_size(10) == 3);
  CHECK(pool_size(2) == 2);
  setenv("MAOBO_THREADS", "junk", 1);
  CHECK(pool_size(10) >= 1);
  unsetenv("MAOBO_THREADS");
  CHECK(pool_size(0) == 1);
}

TEST_CASE("sweep artifacts, table schema and determinism") {
  const auto cfg = parse_config(kSweep);
  const fs::path a = scratch("sweep-a"), b = scratch("sweep-b");
  setenv("MAOBO_THREADS", "2", 1);
  const auto ra = run_sweep(cfg, a);
  setenv("MAOBO_THREADS", "1", 1);
  run_sweep(cfg, b);
  unsetenv("MAOBO_THREADS");
  CHECK(ra.all_ok());

  const auto table = slurp(a / "table.csv");
  CHECK(table == slurp(b / "table.csv"));
  const auto rows = lines(table);
  REQUIRE(rows.size() == 11);
  CHECK(rows[0] ==
        "cell,mode,delta_start,epsilon,seed,status,hypervolume,reduction_iterations,removed_objectives,relative_gap");
  CHECK(rows[1].rfind("baseline-seed1,baseline,,,1,ok,", 0) == 0);
  // baseline rows leave the reduction and gap columns empty
  CHECK(rows[1].substr(rows[1].size() - 3) == ",,,");
  CHECK(rows[3].rfind("d8-e0.05-seed1,reduction,8,0.05,1,ok,", 0) == 0);

  for (const auto& cell : sweep_cells(cfg)) {
    for (const char* f : {"trace.json", "front.csv", "reductions.csv", "summary.json"})
      CHECK_MESSAGE(fs::exists(a / cell.id() / f), cell.id() << "/" << f);
    CHECK(slurp(a / cell.id() / "trace.json") == slurp(b / cell.id() / "trace.json"));
  }

  // every cell is scored against one shared reference
  for (const auto& c : ra.cells) {
    CHECK(c.result->recommendation.front.ref == ra.reference);
    if (!c.spec.baseline) {
      const auto& base = ra.cells[c.spec.seed == 1 ? 0 : 1].result->recommendation.hypervolume;
      CHECK(c.relative_gap ==
            doctest::Approx(std::abs(base - c.result->recommendation.hypervolume) / base));
    } else {
      CHECK(std::isnan(c.relative_gap));
    }
  }
}

TEST_CASE("failing cells are recorded and the rest proceed") {
  auto cfg = parse_config(R"(
[problem]
objectives = paraboloid4
box = -1e80:1e80, -1:1
[run]
iterations = 6
[sweep]
seeds = 1, 2
baseline = false
)");
  const fs::path out = scratch("sweep-fail");
  const auto rep = run_sweep(cfg, out);
  CHECK_FALSE(rep.all_ok());
  REQUIRE(rep.cells.size() == 2);
  CHECK(rep.cells[0].error.find("non-finite") != std::string::npos);
  CHECK(fs::exists(out / rep.cells[0].spec.id() / "error.txt"));
  CHECK(slurp(out / "table.csv").find(",failed,") != std::string::npos);
}

TEST_CASE("trace round trip and summary") {
  auto cfg = parse_config(kSweep);
  cfg.run.delta_start = 8;
  const fs::path out = scratch("single");
  const auto result = run_single(cfg, out);
  const auto stored = io::read_trace(out / "trace.json");
  CHECK(stored.config == result.config);
  CHECK(stored.data.x == result.data.x);
  CHECK(stored.iterations.size() == result.trace.size());
  CHECK(stored.reference == result.recommendation.front.ref);

  const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(summary["schema"] == io::kSummarySchema);
  REQUIRE(result.reductions.size() == 1);
  CHECK(summary["evaluations_saved"][1].get<std::size_t>() == cfg.run.iterations - result.reductions[0].iteration);
  CHECK(summary["evaluations_saved"][0].get<std::size_t>() == 0);

  const auto red = lines(slurp(out / "reductions.csv"));
  REQUIRE(red.size() == 2);
  CHECK(red[0] == "iteration,removed,kept,distance");
  CHECK(red[1].rfind("8,1,0,", 0) == 0);
  CHECK(lines(slurp(out / "front.csv"))[0] == "row,x1,x2,f1,f2,f3");

  CHECK_THROWS_AS(io::read_trace(out / "missing.json"), IoError);
  io::write_text_atomic(out / "bad.json", "{not json");
  CHECK_THROWS_AS(io::read_trace(out / "bad.json"), IoError);
}

TEST_CASE("plot data for a run") {
  auto cfg = parse_config(kSweep);
  cfg.run.delta_start = 8;
  const fs::path run_dir = scratch("plot-run");
  run_single(cfg, run_dir);
  const fs::path out = scratch("plot-out");
  const auto files = emit_plotdata(run_dir, out);
  CHECK(!files.empty());

  const auto series = lines(slurp(out / "hypervolume_series.csv"));
  REQUIRE(series.size() == 1 + (cfg.run.iterations - cfg.run.n_init + 1));
  double prev = -1.0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double hv = std::stod(series[i].substr(series[i].find(',') + 1));
    CHECK(hv >= prev);
    prev = hv;
  }
  // grid has grid_per_dim * d rows plus a header
  const auto surface = lines(slurp(out / "means" / "t06_obj0.csv"));
  CHECK(surface.size() == 1 + 60 * 2);
  CHECK(surface[0] == "x1,x2,mean,variance");

  CHECK_THROWS_AS(emit_plotdata(scratch("plot-empty"), out), IoError);
}

TEST_CASE("small similarity study") {
  StudyConfig sc;
  sc.samples = 30;
  sc.seeds = {1, 2};
  sc.grid_per_dim = 40;
  sc.pairs = {{bench::parse_benchmark("sphere"), bench::parse_benchmark("ellipsoid"), Box::cube(2, -5, 5)},
              {bench::parse_benchmark("michalewicz1d{m=50}"), bench::parse_benchmark("parabola"),
               Box::cube(1, 0.0, 3.141592653589793)}};
  const auto r = run_similarity_study(sc, similarity::SimilarityConfig{});
  REQUIRE(r.pairs.size() == 2);
  CHECK(r.pairs[0].reports.size() == 2);
  CHECK(r.fits.size() == 8);
  CHECK(r.pairs[0].mean < r.pairs[1].mean);
  const auto again = run_similarity_study(sc, similarity::SimilarityConfig{});
  CHECK(study_to_json(again).dump() == study_to_json(r).dump());

  const fs::path out = scratch("study");
  write_study(r, out);
  CHECK(lines(slurp(out / "pairs.csv"))[0] == "f,g,mean,sd,min,max");
  const fs::path plot = scratch("study-plot");
  emit_plotdata(out, plot);
  CHECK(fs::exists(plot / "means"));
  const auto one_d = lines(slurp(plot / "means" / "michalewicz1d_m_50_0_3.141592653589793_seed1.csv"));
  CHECK(one_d[0] == "x,mean");
}
