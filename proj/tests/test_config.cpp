#include "doctest.h"

#include <string>

#include "maobo/config.hpp"
#include "maobo/errors.hpp"

using namespace maobo;

namespace {

const char* kMinimal = R"(
[problem]
preset = branin3
[run]
iterations = 25
seed = 7
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const auto c = parse_config(kMinimal);
  CHECK(c.has_problem);
  CHECK(c.preset == std::optional<std::string>("branin3"));
  CHECK(c.run.problem == bench::preset("branin3"));
  CHECK(c.run.iterations == 25);
  CHECK(c.run.seed == 7);
  CHECK(c.run.n_init == 5);
  CHECK(c.run.similarity.eps1 == 0.25);
  CHECK(c.run.similarity.eps2 == 0.0);
  CHECK(c.run.similarity.delta_tol == 0.0);
  CHECK(c.run.epsilon == 0.1);
  CHECK(c.run.delta_start == 10);
  CHECK(c.run.reduction);
  CHECK_FALSE(c.run.reference);
  // sweep lists fall back to the run settings
  CHECK(c.sweep.delta_start == std::vector<std::size_t>{10});
  CHECK(c.sweep.epsilon == std::vector<double>{0.1});
  CHECK(c.sweep.seeds == std::vector<std::uint64_t>{7});
  CHECK(c.sweep.baseline);
  CHECK(c.study.samples == 200);
}

TEST_CASE("epsilon outside the unit interval names the field and bound") {
  const std::string msg = error_of("[problem]\npreset = branin3\n[run]\nepsilon = 1.5\n");
  CHECK(msg.find("line 4") != std::string::npos);
  CHECK(msg.find("epsilon") != std::string::npos);
  CHECK(msg.find("[0, 1]") != std::string::npos);
  CHECK(error_of("[problem]\npreset = branin3\n[sweep]\nepsilon = 0.1, -0.2\n").find("epsilon") !=
        std::string::npos);
}

TEST_CASE("grammar errors carry line numbers") {
  CHECK(error_of("[problem]\npreset = branin3\n[run]\nbogus = 1\n").find("line 4: bogus") == 0);
  CHECK(error_of("[nope]\n").find("line 1") == 0);
  CHECK(error_of("x = 1\n").find("line 1") == 0);
  CHECK(error_of("[problem]\npreset = branin3\npreset = bowl4\n").find("duplicate key") != std::string::npos);
  CHECK(error_of("[problem]\npreset = branin3\n[run]\n[run]\n").find("duplicate section") != std::string::npos);
  CHECK(error_of("[problem]\npreset = branin3\n[run]\niterations = ten\n").find("line 4: iterations") == 0);
  CHECK(error_of("[problem]\npreset = branin3\n[sweep]\nseeds = 1, 2, 1\n").find("duplicate seed") !=
        std::string::npos);
  CHECK(error_of("[problem]\npreset = branin3\n[run]\nn_init = 1\n").find("n_init") != std::string::npos);
  CHECK(error_of("[problem]\npreset = branin3\n[similarity]\neps1 = 0.9\neps2 = 0.2\n").find("similarity") !=
        std::string::npos);
  CHECK(error_of("[problem]\nobjectives = branin; parabola\n").find("objectives") != std::string::npos);
}

TEST_CASE("missing problem is reported on demand") {
  const auto c = parse_config("[study]\nsamples = 50\n");
  CHECK_FALSE(c.has_problem);
  CHECK_THROWS_AS(c.require_problem(), ConfigError);
}

TEST_CASE("explicit objectives, box and noise") {
  const auto c = parse_config(R"(
# comment line
[problem]
name = custom
objectives = branin; 3*branin + 1; -1*branin
box = -5:10, 0:15
noise = 0.5
[run]
reference = 400, 1200, 10
kernel = squared_exponential
proxy_removed = false
)");
  REQUIRE(c.run.problem.objectives.size() == 3);
  CHECK(c.run.problem.objectives[1].scale == 3.0);
  CHECK(c.run.problem.objectives[1].offset == 1.0);
  CHECK(c.run.problem.box.upper[1] == 15.0);
  CHECK(c.run.problem.noise == std::optional<double>(0.5));
  CHECK(c.run.reference->size() == 3);
  CHECK(c.run.kernel == gp::KernelFamily::SquaredExponential);
  CHECK_FALSE(c.run.proxy_removed);
  CHECK_FALSE(c.preset);
}

TEST_CASE("study pairs") {
  const auto c = parse_config(R"(
[study]
samples = 100
seeds = 3, 4
pair = sphere | ellipsoid
pair = ackley{c=pi} | ackley{c=6pi} | -1:1, -1:1
)");
  REQUIRE(c.study.pairs.size() == 2);
  CHECK(c.study.pairs[0].box == Box::cube(2, -5.0, 5.0));
  CHECK(c.study.pairs[1].box == Box::cube(2, -1.0, 1.0));
  CHECK(c.study.seeds == std::vector<std::uint64_t>{3, 4});
  CHECK_THROWS_AS(parse_config("[study]\npair = sphere | parabola\n"), ConfigError);
}

TEST_CASE("serialize round trips") {
  const char* texts[] = {
      kMinimal,
      R"(
[problem]
objectives = ackley{c=pi} - 0.5; sphere
box = -1:1, -2:2
noise = 0.01
[run]
iterations = 12
n_init = 4
delta_start = 6
epsilon = 0.05
reduction = false
seed = 9
candidates = 300
samples = 8
restarts = 3
grid_per_dim = 50
reference = 5, 9
[similarity]
eps1 = 0.3
eps2 = 0.1
d1 = pnorm
p = inf
delta_tol = 0.001
d2 = none
[sweep]
delta_start = 6, 8
epsilon = 0.05, 0.1
seeds = 1, 2
baseline = false
output = somewhere/else
[study]
samples = 30
seeds = 8
grid_per_dim = 20
pair = sphere | ellipsoid
)",
      "[problem]\npreset = michalewicz4{m=50}\n"};
  for (const char* text : texts) {
    const auto a = parse_config(text);
    const auto text2 = serialize_config(a);
    const auto b = parse_config(text2);
    CHECK(a == b);
    CHECK(serialize_config(b) == text2);
  }
}

TEST_CASE("load_config reports missing files") {
  CHECK_THROWS_AS(load_config("/nonexistent/dir/x.cfg"), IoError);
}
