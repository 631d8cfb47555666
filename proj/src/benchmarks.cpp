#include "maobo/benchmarks.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>

#include "maobo/errors.hpp"

namespace maobo::bench {
namespace {

using std::numbers::pi;
using Vec = Eigen::Ref<const Eigen::VectorXd>;
using Params = std::map<std::string, double>;

struct Entry {
  std::size_t dim;
  Params defaults;
  Box box;
  std::function<double(const Vec&, const Params&)> fn;
};

double michalewicz_term(double x, double m, double stretch) {
  const double s = std::sin(stretch * x * x / pi);
  return -std::sin(x) * std::pow(s * s, m);
}

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> table = [] {
    std::map<std::string, Entry> t;
    t["michalewicz1d"] = {1, {{"m", 10.0}}, Box::cube(1, 0.0, pi),
                          [](const Vec& x, const Params& p) { return michalewicz_term(x[0], p.at("m"), 1.0); }};
    t["michalewicz2d"] = {2, {{"m", 10.0}}, Box::cube(2, 0.0, pi), [](const Vec& x, const Params& p) {
                            return michalewicz_term(x[0], p.at("m"), 1.0) + michalewicz_term(x[1], p.at("m"), 2.0);
                          }};
    t["parabola"] = {1, {}, Box::cube(1, -2.0, 2.0), [](const Vec& x, const Params&) { return x[0] * x[0]; }};
    t["styblinski_tang"] = {2, {}, Box::cube(2, -5.0, 5.0), [](const Vec& x, const Params&) {
                              double s = 0.0;
                              for (Eigen::Index i = 0; i < 2; ++i)
                                s += std::pow(x[i], 4) - 16.0 * x[i] * x[i] + 5.0 * x[i];
                              return 0.5 * s;
                            }};
    t["ellipsoid"] = {2, {}, Box::cube(2, -5.0, 5.0), [](const Vec& x, const Params&) {
                        // sum_i sum_{j<=i} x_j^2
                        return x[0] * x[0] + (x[0] * x[0] + x[1] * x[1]);
                      }};
    t["sphere"] = {2, {}, Box::cube(2, -5.0, 5.0),
                   [](const Vec& x, const Params&) { return x[0] * x[0] + x[1] * x[1]; }};
    t["paraboloid2"] = {2, {}, Box::cube(2, -5.0, 5.0),
                        [](const Vec& x, const Params&) { return x[0] * x[0] + x[1] * x[1]; }};
    t["paraboloid4"] = {2, {}, Box::cube(2, -5.0, 5.0),
                        [](const Vec& x, const Params&) { return std::pow(x[0], 4) + std::pow(x[1], 4); }};
    t["griewank"] = {2, {}, Box::cube(2, -5.0, 5.0), [](const Vec& x, const Params&) {
                       return (x[0] * x[0] + x[1] * x[1]) / 4000.0 - std::cos(x[0]) * std::cos(x[1] / std::sqrt(2.0)) +
                              1.0;
                     }};
    t["levy"] = {2, {}, Box::cube(2, -5.0, 5.0), [](const Vec& x, const Params&) {
                   const double w1 = 1.0 + (x[0] - 1.0) / 4.0;
                   const double w2 = 1.0 + (x[1] - 1.0) / 4.0;
                   const double a = std::sin(pi * w1);
                   const double b = std::sin(pi * w1 + 1.0);
                   const double c = std::sin(2.0 * pi * w2);
                   return a * a + (w1 - 1.0) * (w1 - 1.0) * (1.0 + 10.0 * b * b) +
                          (w2 - 1.0) * (w2 - 1.0) * (1.0 + c * c);
                 }};
    // Cosine term carries the negative exponent as printed in the source
    // formulation: -exp(-(1/2) sum cos(c x_i)).
    t["ackley"] = {2, {{"a", 20.0}, {"b", 0.2}, {"c", 2.0 * pi}}, Box::cube(2, -5.0, 5.0),
                   [](const Vec& x, const Params& p) {
                     const double a = p.at("a"), b = p.at("b"), c = p.at("c");
                     const double rms = std::sqrt(0.5 * (x[0] * x[0] + x[1] * x[1]));
                     const double cosines = std::cos(c * x[0]) + std::cos(c * x[1]);
                     return -a * std::exp(-b * rms) - std::exp(-0.5 * cosines) + a + std::numbers::e;
                   }};
    t["branin"] = {2, {}, Box(Eigen::Vector2d(-5.0, 0.0), Eigen::Vector2d(10.0, 15.0)),
                   [](const Vec& x, const Params&) {
                     const double u = x[1] - 5.1 * x[0] * x[0] / (4.0 * pi * pi) + 5.0 * x[0] / pi - 6.0;
                     return u * u + 10.0 * (1.0 - 1.0 / (8.0 * pi)) * std::cos(x[0]) + 10.0;
                   }};
    t["beale"] = {2, {}, Box::cube(2, -4.5, 4.5), [](const Vec& x, const Params&) {
                    const double a = 1.5 - x[0] + x[0] * x[1];
                    const double b = 2.25 - x[0] + x[0] * x[1] * x[1];
                    const double c = 2.625 - x[0] + x[0] * x[1] * x[1] * x[1];
                    return a * a + b * b + c * c;
                  }};
    t["gramacy"] = {2, {}, Box::cube(2, -2.0, 4.0),
                    [](const Vec& x, const Params&) { return x[0] * std::exp(-x[0] * x[0] - x[1] * x[1]); }};
    return t;
  }();
  return table;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

double parse_number(const std::string& raw, const std::string& context) {
  const std::string s = trim(raw);
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    std::string coeff = trim(s.substr(0, s.size() - 2));
    if (!coeff.empty() && coeff.back() == '*') coeff = trim(coeff.substr(0, coeff.size() - 1));
    if (coeff.empty()) return pi;
    if (coeff == "-") return -pi;
    return parse_number(coeff, context) * pi;
  }
  if (s.empty()) throw InvalidInput(context + ": empty number");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) throw InvalidInput(context + ": invalid number '" + s + "'");
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double BenchmarkFn::operator()(const Vec& x) const {
  if (static_cast<std::size_t>(x.size()) != dim)
    throw DimensionMismatch(name + " expects " + std::to_string(dim) + " inputs, got " + std::to_string(x.size()));
  return registry().at(name).fn(x, params);
}

std::string BenchmarkFn::id() const {
  std::string out = name;
  if (params.empty()) return out;
  out += '{';
  bool first = true;
  for (const auto& [k, v] : params) {
    if (!first) out += ',';
    first = false;
    out += k + "=" + format_double(v);
  }
  return out + '}';
}

std::vector<std::string> benchmark_names() {
  std::vector<std::string> names;
  for (const auto& [k, _] : registry()) names.push_back(k);
  return names;
}

BenchmarkFn make_benchmark(std::string_view name, const Params& params) {
  const auto it = registry().find(std::string(name));
  if (it == registry().end()) throw InvalidInput("unknown benchmark function '" + std::string(name) + "'");
  BenchmarkFn fn;
  fn.name = it->first;
  fn.dim = it->second.dim;
  fn.params = it->second.defaults;
  fn.default_box = it->second.box;
  for (const auto& [k, v] : params) {
    if (!fn.params.count(k)) throw InvalidInput(fn.name + " has no parameter '" + k + "'");
    fn.params[k] = v;
  }
  return fn;
}

BenchmarkFn parse_benchmark(std::string_view text) {
  const std::string s = trim(text);
  const auto brace = s.find('{');
  if (brace == std::string::npos) return make_benchmark(s);
  if (s.back() != '}') throw InvalidInput("benchmark '" + s + "': missing closing brace");
  const std::string name = trim(s.substr(0, brace));
  const std::string body = s.substr(brace + 1, s.size() - brace - 2);
  Params params;
  std::size_t start = 0;
  while (start <= body.size()) {
    const auto comma = body.find(',', start);
    const std::string item = trim(body.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw InvalidInput("benchmark '" + s + "': expected key=value, got '" + item + "'");
      params[trim(item.substr(0, eq))] = parse_number(item.substr(eq + 1), "benchmark '" + s + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return make_benchmark(name, params);
}

double eval(const BenchmarkFn& fn, const Vec& x) { return fn(x); }

std::string ObjectiveTerm::label() const {
  std::string out;
  if (scale != 1.0) out += format_double(scale) + "*";
  out += fn.id();
  if (offset > 0.0) out += "+" + format_double(offset);
  if (offset < 0.0) out += "-" + format_double(-offset);
  return out;
}

ObjectiveTerm parse_objective_term(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw InvalidInput("empty objective term");
  ObjectiveTerm term;

  // Leading "scale *" lives outside any braces.
  std::size_t pos = 0;
  int depth = 0;
  std::size_t star = std::string::npos;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '{') ++depth;
    if (s[i] == '}') --depth;
    if (depth == 0 && s[i] == '*') {
      star = i;
      break;
    }
    if (depth == 0 && std::isalpha(static_cast<unsigned char>(s[i])) && s.compare(i, 2, "pi") != 0) break;
  }
  if (star != std::string::npos) {
    term.scale = parse_number(s.substr(0, star), "objective '" + s + "'");
    pos = star + 1;
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;

  std::size_t end = pos;
  while (end < s.size() && (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_')) ++end;
  if (end == pos) throw InvalidInput("objective '" + s + "': missing function name");
  if (end < s.size() && s[end] == '{') {
    const auto close = s.find('}', end);
    if (close == std::string::npos) throw InvalidInput("objective '" + s + "': missing closing brace");
    end = close + 1;
  }
  term.fn = parse_benchmark(s.substr(pos, end - pos));

  const std::string rest = trim(s.substr(end));
  if (!rest.empty()) {
    if (rest[0] != '+' && rest[0] != '-') throw InvalidInput("objective '" + s + "': unexpected '" + rest + "'");
    const double mag = parse_number(rest.substr(1), "objective '" + s + "'");
    term.offset = rest[0] == '+' ? mag : -mag;
  }
  return term;
}

void ProblemSpec::validate() const {
  if (objectives.empty()) throw InvalidInput("problem needs at least one objective");
  if (box.dim() == 0) throw InvalidInput("problem box is empty");
  for (const auto& o : objectives) {
    if (o.fn.dim != box.dim())
      throw DimensionMismatch("objective " + o.label() + " has dimension " + std::to_string(o.fn.dim) +
                              ", problem box has " + std::to_string(box.dim()));
    if (!std::isfinite(o.scale) || !std::isfinite(o.offset))
      throw InvalidInput("objective " + o.label() + " has a non-finite transform");
  }
  if (noise && !(*noise >= 0.0 && std::isfinite(*noise))) throw InvalidInput("noise must be a non-negative number");
}

Problem::Problem(ProblemSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

Eigen::VectorXd Problem::evaluate(const Vec& x) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(num_objectives()));
  for (std::size_t j = 0; j < num_objectives(); ++j) out[static_cast<Eigen::Index>(j)] = spec_.objectives[j](x);
  return out;
}

double Problem::evaluate(std::size_t objective, const Vec& x) const {
  if (objective >= num_objectives()) throw InvalidInput("objective index out of range");
  return spec_.objectives[objective](x);
}

Eigen::MatrixXd Problem::evaluate_rows(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(num_objectives()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.row(i) = evaluate(x.row(i).transpose()).transpose();
  return out;
}

Problem make_problem(ProblemSpec spec) { return Problem(std::move(spec)); }

std::vector<std::string> preset_names() { return {"branin3", "bowl4", "michalewicz4"}; }

ProblemSpec preset(std::string_view id) {
  const std::string s = trim(id);
  const auto brace = s.find('{');
  const std::string name = s.substr(0, brace);
  Params params;
  if (brace != std::string::npos) params = parse_benchmark("michalewicz2d" + s.substr(brace)).params;

  ProblemSpec spec;
  spec.name = s;
  if (name == "branin3") {
    if (brace != std::string::npos) throw InvalidInput("preset branin3 takes no parameters");
    const auto f = make_benchmark("branin");
    spec.objectives = {{f, 1.0, 0.0}, {f, 3.0, 0.0}, {f, -1.0, 0.0}};
    spec.box = f.default_box;
  } else if (name == "bowl4") {
    if (brace != std::string::npos) throw InvalidInput("preset bowl4 takes no parameters");
    spec.objectives = {{make_benchmark("griewank")},
                       {make_benchmark("paraboloid2")},
                       {make_benchmark("paraboloid4")},
                       {make_benchmark("gramacy")}};
    spec.box = Box::cube(2, -kBowl4HalfWidth, kBowl4HalfWidth);
  } else if (name == "michalewicz4") {
    const double m = params.count("m") && brace != std::string::npos ? params.at("m") : 75.0;
    spec.name = "michalewicz4{m=" + format_double(m) + "}";
    spec.objectives = {{make_benchmark("michalewicz2d", {{"m", m}})},
                       {make_benchmark("michalewicz2d", {{"m", 100.0}})},
                       {make_benchmark("beale")},
                       {make_benchmark("styblinski_tang")}};
    spec.box = Box::cube(2, 0.0, pi);
  } else {
    throw InvalidInput("unknown problem preset '" + s + "'");
  }
  return spec;
}

}  // namespace maobo::bench
