#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "maobo/maobo.h"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string in;
  std::optional<std::uint64_t> seed;
  bool no_reduction = false;
  int verbosity = 0;
};

using Experiment = std::unique_ptr<maobo_experiment, decltype(&maobo_experiment_destroy)>;

int report(maobo_status s) {
  std::fprintf(stderr, "maobo: %s: %s\n", maobo_status_string(s), maobo_last_error());
  return s == MAOBO_ERR_RUN_FAILED ? 2 : 1;
}

// Loads the experiment and applies the command-line overrides.
maobo_status open(const Options& o, bool config_required, Experiment& exp) {
  maobo_experiment* raw = nullptr;
  maobo_status s = MAOBO_OK;
  if (!o.config.empty()) {
    s = maobo_experiment_from_file(o.config.c_str(), &raw);
  } else if (config_required) {
    std::fprintf(stderr, "maobo: --config is required\n");
    return MAOBO_ERR_INVALID_ARGUMENT;
  } else {
    s = maobo_experiment_from_string("", &raw);
  }
  if (s != MAOBO_OK) return s;
  exp.reset(raw);
  if (o.seed && (s = maobo_experiment_set_seed(raw, *o.seed)) != MAOBO_OK) return s;
  if (o.no_reduction && (s = maobo_experiment_set_reduction(raw, 0)) != MAOBO_OK) return s;
  if (!o.out.empty() && (s = maobo_experiment_set_output(raw, o.out.c_str())) != MAOBO_OK) return s;
  return MAOBO_OK;
}

int cmd_run(const Options& o) {
  Experiment exp(nullptr, &maobo_experiment_destroy);
  if (auto s = open(o, true, exp); s != MAOBO_OK) return report(s);
  maobo_run_summary sum{};
  if (auto s = maobo_experiment_run(exp.get(), &sum); s != MAOBO_OK) return report(s);
  std::printf("hypervolume %.17g  front %zu  reductions %zu  evaluations saved %zu\n", sum.hypervolume,
              sum.front_size, sum.reductions, sum.evaluations_saved);
  return 0;
}

int cmd_sweep(const Options& o) {
  Experiment exp(nullptr, &maobo_experiment_destroy);
  if (auto s = open(o, true, exp); s != MAOBO_OK) return report(s);
  maobo_sweep_summary sum{};
  const auto s = maobo_experiment_sweep(exp.get(), &sum);
  std::printf("%zu cells, %zu failed\n", sum.cells, sum.failed);
  return s == MAOBO_OK ? 0 : report(s);
}

int cmd_similarity(const Options& o) {
  Experiment exp(nullptr, &maobo_experiment_destroy);
  if (auto s = open(o, false, exp); s != MAOBO_OK) return report(s);
  if (auto s = maobo_experiment_study(exp.get()); s != MAOBO_OK) return report(s);
  for (size_t i = 0; i < maobo_experiment_study_pairs(exp.get()); ++i) {
    const char *f = nullptr, *g = nullptr;
    double mean = 0, sd = 0;
    maobo_experiment_study_pair(exp.get(), i, &f, &g, &mean, &sd);
    std::printf("%-28s %-28s %.4f (sd %.4f)\n", f, g, mean, sd);
  }
  return 0;
}

int cmd_plotdata(const Options& o) {
  const std::string out = o.out.empty() ? o.in + "/plotdata" : o.out;
  size_t files = 0;
  if (auto s = maobo_plotdata(o.in.c_str(), out.c_str(), &files); s != MAOBO_OK) return report(s);
  std::printf("%zu files written to %s\n", files, out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Many-objective Bayesian optimization with objective reduction"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", o.config, "experiment config file");
    if (config_required) c->required();
    sub->add_option("--out", o.out, "output directory (default: [sweep] output)");
    sub->add_option("--seed", o.seed, "override every seed");
    sub->add_flag("-v", o.verbosity, "more logging on stderr (repeatable)");
  };

  auto* run = app.add_subcommand("run", "single optimization run");
  common(run, true);
  run->add_flag("--no-reduction", o.no_reduction, "disable objective reduction");

  auto* sweep = app.add_subcommand("sweep", "baseline and delta_start x epsilon x seed grid");
  common(sweep, true);
  sweep->add_flag("--no-reduction", o.no_reduction, "baseline cells only");

  auto* sim = app.add_subcommand("similarity", "pairwise metric study over sampled functions");
  common(sim, false);

  auto* plot = app.add_subcommand("plotdata", "CSV plot data from run, sweep or study artifacts");
  plot->add_option("--in", o.in, "artifact directory")->required();
  plot->add_option("--out", o.out, "output directory (default: <in>/plotdata)");
  plot->add_flag("-v", o.verbosity, "more logging on stderr");

  CLI11_PARSE(app, argc, argv);
  maobo_set_verbosity(1 + o.verbosity);

  if (*run) return cmd_run(o);
  if (*sweep) return cmd_sweep(o);
  if (*sim) return cmd_similarity(o);
  return cmd_plotdata(o);
}
