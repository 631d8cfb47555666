#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "maobo/box.hpp"

namespace maobo::bench {

/// Analytic test objective, addressable by `name{key=value,...}`.
struct BenchmarkFn {
  std::string name;
  std::size_t dim = 0;
  std::map<std::string, double> params;
  Box default_box;

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Canonical identifier, e.g. "ackley{a=20,b=0.2,c=6.28318530717958}".
  std::string id() const;

  bool operator==(const BenchmarkFn& other) const {
    return name == other.name && dim == other.dim && params == other.params && default_box == other.default_box;
  }
};

/// Registered function names.
std::vector<std::string> benchmark_names();

/// Builds a benchmark with defaults, overridden by `params`. Unknown names or
/// parameter keys throw InvalidInput.
BenchmarkFn make_benchmark(std::string_view name, const std::map<std::string, double>& params = {});

/// Parses "name" or "name{key=value,...}". Values accept "pi" multiples such as
/// "6pi" or "6*pi".
BenchmarkFn parse_benchmark(std::string_view text);

double eval(const BenchmarkFn& fn, const Eigen::Ref<const Eigen::VectorXd>& x);

/// One objective: scale * fn(x) + offset.
struct ObjectiveTerm {
  BenchmarkFn fn;
  double scale = 1.0;
  double offset = 0.0;

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const { return scale * fn(x) + offset; }
  /// Round-trippable text form accepted by parse_objective_term.
  std::string label() const;
  bool operator==(const ObjectiveTerm&) const = default;
};

/// Parses "[scale *] name[{params}] [(+|-) offset]", e.g. "-1*branin" or
/// "3 * branin + 2".
ObjectiveTerm parse_objective_term(std::string_view text);

struct ProblemSpec {
  std::string name;
  std::vector<ObjectiveTerm> objectives;
  Box box;
  std::optional<double> noise;  // nullopt: 1% of each objective's initial-design range

  void validate() const;
  bool operator==(const ProblemSpec&) const = default;
};

/// Evaluatable k-objective problem.
class Problem {
 public:
  explicit Problem(ProblemSpec spec);

  const ProblemSpec& spec() const { return spec_; }
  std::size_t num_objectives() const { return spec_.objectives.size(); }
  std::size_t dim() const { return spec_.box.dim(); }
  const Box& box() const { return spec_.box; }

  Eigen::VectorXd evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  double evaluate(std::size_t objective, const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Row-wise evaluation of all objectives, n x k.
  Eigen::MatrixXd evaluate_rows(const Eigen::MatrixXd& x) const;

 private:
  ProblemSpec spec_;
};

Problem make_problem(ProblemSpec spec);

/// Half-width of the shared bowl4 input box [-w, w]^2.
inline constexpr double kBowl4HalfWidth = 120.0;

/// Named presets: "branin3", "bowl4", "michalewicz4" (accepts {m=...} for the
/// first Michalewicz exponent, default 75).
ProblemSpec preset(std::string_view id);
std::vector<std::string> preset_names();

/// Real number, also accepting pi multiples ("pi", "-pi", "6pi", "0.5*pi").
/// `context` prefixes the InvalidInput message.
double parse_number(const std::string& text, const std::string& context);

/// Shortest text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace maobo::bench
