#include "doctest.h"

#include <cmath>
#include <numbers>

#include "maobo/benchmarks.hpp"
#include "maobo/errors.hpp"

using namespace maobo;
using namespace maobo::bench;

namespace {

double at(const char* name, double x0, double x1) { return parse_benchmark(name)(Eigen::Vector2d(x0, x1)); }

}  // namespace

TEST_CASE("known values") {
  CHECK(at("sphere", 0, 0) == 0.0);
  CHECK(at("griewank", 0, 0) == 0.0);
  CHECK(at("branin", std::numbers::pi, 2.275) == doctest::Approx(0.397887).epsilon(1e-5));
  CHECK(at("branin", -std::numbers::pi, 12.275) == doctest::Approx(0.397887).epsilon(1e-5));
  CHECK(at("beale", 3.0, 0.5) == doctest::Approx(0.0));
  CHECK(at("levy", 1.0, 1.0) == doctest::Approx(0.0));
  CHECK(at("styblinski_tang", -2.903534, -2.903534) == doctest::Approx(-78.33234).epsilon(1e-6));
  CHECK(at("ellipsoid", 1.0, 2.0) == doctest::Approx(6.0));
  CHECK(at("paraboloid4", 1.0, 2.0) == doctest::Approx(17.0));
  CHECK(at("gramacy", 0.0, 0.0) == 0.0);
  CHECK(at("gramacy", -std::sqrt(0.5), 0.0) == doctest::Approx(-std::sqrt(0.5) * std::exp(-0.5)));
  // michalewicz 2-D minimum for m = 10
  CHECK(at("michalewicz2d", 2.20, 1.57) == doctest::Approx(-1.8013).epsilon(1e-3));
  const auto m1 = parse_benchmark("michalewicz1d{m=10}");
  CHECK(m1(Eigen::VectorXd::Constant(1, 2.20)) == doctest::Approx(-0.8013).epsilon(1e-3));
}

TEST_CASE("known minimisers beat every corner of the default box") {
  struct Case {
    const char* name;
    Eigen::Vector2d best;
  };
  const Case cases[] = {{"sphere", {0, 0}},          {"ellipsoid", {0, 0}}, {"griewank", {0, 0}},
                        {"levy", {1, 1}},            {"branin", {std::numbers::pi, 2.275}},
                        {"beale", {3, 0.5}},         {"styblinski_tang", {-2.903534, -2.903534}},
                        {"michalewicz2d", {2.20, 1.57}}};
  for (const auto& c : cases) {
    const auto fn = parse_benchmark(c.name);
    const double best = fn(c.best);
    const auto& b = fn.default_box;
    for (int mask = 0; mask < 4; ++mask) {
      const Eigen::Vector2d corner(mask & 1 ? b.upper[0] : b.lower[0], mask & 2 ? b.upper[1] : b.lower[1]);
      CHECK_MESSAGE(best < fn(corner), c.name);
    }
  }
}

TEST_CASE("parameter parsing") {
  const auto a = parse_benchmark("ackley{c=6*pi}");
  CHECK(a.params.at("c") == doctest::Approx(6.0 * std::numbers::pi));
  CHECK(a.params.at("a") == 20.0);
  CHECK(parse_benchmark("ackley{c=6pi}") == a);
  CHECK(parse_benchmark(a.id()) == a);
  CHECK(parse_benchmark("michalewicz2d{m=100}").id() == "michalewicz2d{m=100}");
  CHECK(parse_number("-pi", "x") == -std::numbers::pi);
  CHECK(parse_number("0.5*pi", "x") == doctest::Approx(std::numbers::pi / 2));
  CHECK_THROWS_AS(parse_benchmark("nope"), InvalidInput);
  CHECK_THROWS_AS(parse_benchmark("ackley{q=1}"), InvalidInput);
  CHECK_THROWS_AS(parse_benchmark("ackley{a=}"), InvalidInput);
  CHECK_THROWS_AS(parse_number("abc", "x"), InvalidInput);
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 70.0, 1e-5, -2.5e300, 6.283185307179586}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(70.0) == "70");
  CHECK(format_double(0.05) == "0.05");
}

TEST_CASE("dimension mismatch") {
  CHECK_THROWS_AS(parse_benchmark("branin")(Eigen::Vector3d(0, 0, 0)), DimensionMismatch);
}

TEST_CASE("objective terms") {
  const auto t = parse_objective_term("3 * branin + 2");
  CHECK(t.scale == 3.0);
  CHECK(t.offset == 2.0);
  CHECK(parse_objective_term(t.label()) == t);
  const auto neg = parse_objective_term("-1*branin");
  CHECK(neg.scale == -1.0);
  const Eigen::Vector2d x(1.0, 4.0);
  CHECK(t(x) == 3.0 * t.fn(x) + 2.0);
  CHECK(parse_objective_term("ackley{c=pi} - 0.5").offset == -0.5);
}

TEST_CASE("presets") {
  const auto b3 = make_problem(preset("branin3"));
  REQUIRE(b3.num_objectives() == 3);
  for (const Eigen::Vector2d x : {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(7.3, 11.1), Eigen::Vector2d(-4.0, 2.0)}) {
    const Eigen::VectorXd y = b3.evaluate(x);
    CHECK(y[1] == 3.0 * y[0]);
    CHECK(y[2] == -y[0]);
  }
  const auto bowl = make_problem(preset("bowl4"));
  CHECK(bowl.evaluate(Eigen::Vector2d(0.0, 0.0)) == Eigen::Vector4d::Zero());
  CHECK(bowl.box().upper[0] == kBowl4HalfWidth);

  const auto m4 = preset("michalewicz4{m=50}");
  CHECK(m4.objectives[0].fn.params.at("m") == 50.0);
  CHECK(preset("michalewicz4").objectives[0].fn.params.at("m") == 75.0);
  CHECK_THROWS_AS(preset("branin3{m=2}"), InvalidInput);
  CHECK_THROWS_AS(preset("nope"), InvalidInput);
}

TEST_CASE("problem validation") {
  ProblemSpec spec;
  spec.objectives = {{parse_benchmark("branin")}, {parse_benchmark("parabola")}};
  spec.box = Box::cube(2, 0.0, 1.0);
  CHECK_THROWS_AS(spec.validate(), DimensionMismatch);
  spec.objectives.clear();
  CHECK_THROWS_AS(spec.validate(), InvalidInput);
}

TEST_CASE("row evaluation") {
  const auto p = make_problem(preset("branin3"));
  Eigen::MatrixXd x(2, 2);
  x << 0.0, 1.0, 2.0, 3.0;
  const Eigen::MatrixXd y = p.evaluate_rows(x);
  CHECK(y.rows() == 2);
  CHECK(y.row(1).transpose() == p.evaluate(x.row(1).transpose()));
  CHECK(p.evaluate(2, x.row(0).transpose()) == y(0, 2));
}
