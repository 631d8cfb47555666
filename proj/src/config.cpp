#include "maobo/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "maobo/errors.hpp"

namespace maobo {

namespace {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

using Section = std::vector<Entry>;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '{') ++depth;
    if (c == '}') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"problem", {"preset", "objectives", "box", "noise", "name"}},
      {"run",
       {"iterations", "n_init", "delta_start", "epsilon", "reduction", "seed", "candidates", "samples", "kernel",
        "restarts", "grid_per_dim", "reference", "proxy_removed"}},
      {"similarity", {"eps1", "eps2", "d1", "p", "delta_tol", "d2"}},
      {"sweep", {"delta_start", "epsilon", "seeds", "baseline", "output"}},
      {"study", {"samples", "seeds", "grid_per_dim", "pair"}},
  };
  return keys;
}

// Wraps library validation failures into line-numbered config errors.
template <typename F>
auto at(const Entry& e, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& err) {
    throw ConfigError(e.line, e.key, err.what());
  }
}

double number(const Entry& e, const std::string& text) {
  return at(e, [&] { return bench::parse_number(text, "value"); });
}

double number(const Entry& e) { return number(e, e.value); }

std::uint64_t unsigned_int(const Entry& e, const std::string& text) {
  const std::string s = trim(text);
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw ConfigError(e.line, e.key, "expected a non-negative integer, got '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw ConfigError(e.line, e.key, "integer out of range: '" + s + "'");
  }
}

std::uint64_t unsigned_int(const Entry& e) { return unsigned_int(e, e.value); }

bool boolean(const Entry& e) {
  if (e.value == "true" || e.value == "yes" || e.value == "on" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "off" || e.value == "0") return false;
  throw ConfigError(e.line, e.key, "expected true or false, got '" + e.value + "'");
}

double unit_interval(const Entry& e, double v, const std::string& name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw ConfigError(e.line, name, name + " must lie in [0, 1], got " + bench::format_double(v));
  return v;
}

std::vector<std::string> list(const Entry& e) {
  auto items = split(e.value, ',');
  for (const auto& s : items)
    if (s.empty()) throw ConfigError(e.line, e.key, "empty list element");
  return items;
}

Box parse_box(const Entry& e, const std::string& text) {
  const auto dims = split(text, ',');
  Eigen::VectorXd lo(static_cast<Eigen::Index>(dims.size())), hi(lo.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const auto colon = dims[i].find(':');
    if (colon == std::string::npos)
      throw ConfigError(e.line, e.key, "box dimension '" + dims[i] + "' must be lo:hi");
    lo[static_cast<Eigen::Index>(i)] = number(e, dims[i].substr(0, colon));
    hi[static_cast<Eigen::Index>(i)] = number(e, dims[i].substr(colon + 1));
  }
  return at(e, [&] { return Box(lo, hi); });
}

std::string box_text(const Box& box) {
  std::string out;
  for (std::size_t i = 0; i < box.dim(); ++i) {
    if (i) out += ", ";
    out += bench::format_double(box.lower[static_cast<Eigen::Index>(i)]) + ":" +
           bench::format_double(box.upper[static_cast<Eigen::Index>(i)]);
  }
  return out;
}

std::vector<std::uint64_t> seed_list(const Entry& e) {
  std::vector<std::uint64_t> out;
  std::set<std::uint64_t> seen;
  for (const auto& s : list(e)) {
    const auto v = unsigned_int(e, s);
    if (!seen.insert(v).second) throw ConfigError(e.line, e.key, "duplicate seed " + s);
    out.push_back(v);
  }
  return out;
}

StudyPair parse_pair(const Entry& e) {
  const auto parts = split(e.value, '|');
  if (parts.size() < 2 || parts.size() > 3)
    throw ConfigError(e.line, e.key, "expected 'f | g' or 'f | g | box'");
  StudyPair pair;
  pair.f = at(e, [&] { return bench::parse_benchmark(parts[0]); });
  pair.g = at(e, [&] { return bench::parse_benchmark(parts[1]); });
  if (pair.f.dim != pair.g.dim) throw ConfigError(e.line, e.key, "functions differ in input dimension");
  if (parts.size() == 3) {
    pair.box = parse_box(e, parts[2]);
  } else if (pair.f.default_box == pair.g.default_box) {
    pair.box = pair.f.default_box;
  } else {
    throw ConfigError(e.line, e.key, "functions have different default boxes; give one explicitly");
  }
  if (pair.box.dim() != pair.f.dim) throw ConfigError(e.line, e.key, "box dimension differs from the functions");
  return pair;
}

std::string join(const auto& values, auto&& fmt, const char* sep = ", ") {
  std::string out;
  bool first = true;
  for (const auto& v : values) {
    if (!first) out += sep;
    out += fmt(v);
    first = false;
  }
  return out;
}

}  // namespace

void ExperimentConfig::require_problem() const {
  if (!has_problem) throw ConfigError(0, "problem", "missing [problem] section");
}

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, Section> sections;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "", "unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(current)) throw ConfigError(line_no, "", "unknown section [" + current + "]");
      if (sections.count(current)) throw ConfigError(line_no, "", "duplicate section [" + current + "]");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "", "expected key = value");
    if (current.empty()) throw ConfigError(line_no, "", "key outside of any section");
    Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
    if (!known_keys().at(current).count(e.key))
      throw ConfigError(line_no, e.key, "unknown key in [" + current + "]");
    if (e.value.empty()) throw ConfigError(line_no, e.key, "empty value");
    auto& sec = sections[current];
    if (e.key != "pair")
      for (const auto& prev : sec)
        if (prev.key == e.key) throw ConfigError(line_no, e.key, "duplicate key");
    sec.push_back(std::move(e));
  }

  auto find = [&](const std::string& section, const std::string& key) -> const Entry* {
    auto it = sections.find(section);
    if (it == sections.end()) return nullptr;
    for (const auto& e : it->second)
      if (e.key == key) return &e;
    return nullptr;
  };

  ExperimentConfig cfg;
  RunConfig& run = cfg.run;

  if (sections.count("problem")) {
    cfg.has_problem = true;
    const Entry* preset = find("problem", "preset");
    const Entry* objectives = find("problem", "objectives");
    const Entry* box = find("problem", "box");
    if (preset && objectives) throw ConfigError(objectives->line, "objectives", "conflicts with preset");
    if (preset) {
      run.problem = at(*preset, [&] { return bench::preset(preset->value); });
      cfg.preset = preset->value;
    } else if (objectives) {
      for (const auto& term : split(objectives->value, ';'))
        run.problem.objectives.push_back(at(*objectives, [&] { return bench::parse_objective_term(term); }));
      run.problem.name = "custom";
      if (!box) {
        const Box& def = run.problem.objectives.front().fn.default_box;
        for (const auto& o : run.problem.objectives)
          if (!(o.fn.default_box == def))
            throw ConfigError(objectives->line, "box", "objectives have different default boxes; give box");
        run.problem.box = def;
      }
    } else {
      throw ConfigError(0, "objectives", "[problem] needs preset or objectives");
    }
    if (box) run.problem.box = parse_box(*box, box->value);
    if (const Entry* e = find("problem", "noise")) {
      if (e->value == "auto") {
        run.problem.noise.reset();
      } else {
        const double v = number(*e);
        if (v < 0.0) throw ConfigError(e->line, e->key, "noise must be non-negative");
        run.problem.noise = v;
      }
    }
    if (const Entry* e = find("problem", "name")) run.problem.name = e->value;
    const Entry* anchor = objectives ? objectives : preset;
    at(*anchor, [&] { run.problem.validate(); });
  }

  if (const Entry* e = find("run", "iterations")) run.iterations = unsigned_int(*e);
  if (const Entry* e = find("run", "n_init")) run.n_init = unsigned_int(*e);
  if (const Entry* e = find("run", "delta_start")) run.delta_start = unsigned_int(*e);
  if (const Entry* e = find("run", "epsilon")) run.epsilon = unit_interval(*e, number(*e), "epsilon");
  if (const Entry* e = find("run", "reduction")) run.reduction = boolean(*e);
  if (const Entry* e = find("run", "seed")) run.seed = unsigned_int(*e);
  if (const Entry* e = find("run", "candidates")) run.acquisition.candidates = unsigned_int(*e);
  if (const Entry* e = find("run", "samples")) run.acquisition.samples = unsigned_int(*e);
  if (const Entry* e = find("run", "kernel"))
    run.kernel = at(*e, [&] { return gp::kernel_family_from_string(e->value); });
  if (const Entry* e = find("run", "proxy_removed")) run.proxy_removed = boolean(*e);
  if (const Entry* e = find("run", "restarts")) run.restarts = unsigned_int(*e);
  if (const Entry* e = find("run", "grid_per_dim")) run.grid_per_dim = unsigned_int(*e);
  if (const Entry* e = find("run", "reference")) {
    const auto items = list(*e);
    Eigen::VectorXd ref(static_cast<Eigen::Index>(items.size()));
    for (std::size_t i = 0; i < items.size(); ++i) ref[static_cast<Eigen::Index>(i)] = number(*e, items[i]);
    run.reference = ref;
  }

  auto& sim = run.similarity;
  if (const Entry* e = find("similarity", "eps1")) sim.eps1 = unit_interval(*e, number(*e), "eps1");
  if (const Entry* e = find("similarity", "eps2")) sim.eps2 = unit_interval(*e, number(*e), "eps2");
  if (const Entry* e = find("similarity", "d1"))
    sim.d1_mode = at(*e, [&] { return similarity::mean_mode_from_string(e->value); });
  if (const Entry* e = find("similarity", "p"))
    sim.p = e->value == "inf" ? std::numeric_limits<double>::infinity() : number(*e);
  if (const Entry* e = find("similarity", "delta_tol")) sim.delta_tol = number(*e);
  if (const Entry* e = find("similarity", "d2"))
    sim.d2_mode = at(*e, [&] { return similarity::cov_mode_from_string(e->value); });
  if (sections.count("similarity")) {
    const Entry& anchor = sections["similarity"].front();
    try {
      sim.validate();
    } catch (const Error& err) {
      throw ConfigError(anchor.line, "similarity", err.what());
    }
  }

  // cross-field checks on [run]
  if (run.n_init < 2) throw ConfigError(find("run", "n_init") ? find("run", "n_init")->line : 0, "n_init", "must be at least 2");
  if (run.iterations < run.n_init)
    throw ConfigError(find("run", "iterations") ? find("run", "iterations")->line : 0, "iterations",
                      "must be at least n_init (" + std::to_string(run.n_init) + ")");
  for (const char* key : {"candidates", "samples", "restarts", "grid_per_dim"}) {
    if (const Entry* e = find("run", key); e && unsigned_int(*e) == 0)
      throw ConfigError(e->line, key, "must be positive");
  }
  if (run.reference && cfg.has_problem &&
      static_cast<std::size_t>(run.reference->size()) != run.problem.objectives.size())
    throw ConfigError(find("run", "reference")->line, "reference",
                      "expected " + std::to_string(run.problem.objectives.size()) + " values");

  auto& sweep = cfg.sweep;
  if (const Entry* e = find("sweep", "delta_start")) {
    for (const auto& s : list(*e)) sweep.delta_start.push_back(unsigned_int(*e, s));
  } else {
    sweep.delta_start = {run.delta_start};
  }
  if (const Entry* e = find("sweep", "epsilon")) {
    for (const auto& s : list(*e)) sweep.epsilon.push_back(unit_interval(*e, number(*e, s), "epsilon"));
  } else {
    sweep.epsilon = {run.epsilon};
  }
  if (const Entry* e = find("sweep", "seeds")) {
    sweep.seeds = seed_list(*e);
  } else {
    sweep.seeds = {run.seed};
  }
  if (const Entry* e = find("sweep", "baseline")) sweep.baseline = boolean(*e);
  if (const Entry* e = find("sweep", "output")) sweep.output = e->value;

  auto& study = cfg.study;
  if (const Entry* e = find("study", "samples")) {
    study.samples = unsigned_int(*e);
    if (study.samples < 2) throw ConfigError(e->line, e->key, "must be at least 2");
  }
  if (const Entry* e = find("study", "seeds")) study.seeds = seed_list(*e);
  if (const Entry* e = find("study", "grid_per_dim")) {
    study.grid_per_dim = unsigned_int(*e);
    if (study.grid_per_dim == 0) throw ConfigError(e->line, e->key, "must be positive");
  }
  if (sections.count("study"))
    for (const auto& e : sections["study"])
      if (e.key == "pair") study.pairs.push_back(parse_pair(e));

  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  const RunConfig& run = cfg.run;
  const auto num = [](double v) { return bench::format_double(v); };
  std::ostringstream out;

  if (cfg.has_problem) {
    out << "[problem]\n";
    if (cfg.preset) {
      out << "preset = " << *cfg.preset << "\n";
    } else {
      out << "objectives = "
          << join(run.problem.objectives, [](const bench::ObjectiveTerm& t) { return t.label(); }, "; ") << "\n";
    }
    out << "box = " << box_text(run.problem.box) << "\n";
    out << "noise = " << (run.problem.noise ? num(*run.problem.noise) : std::string("auto")) << "\n";
    out << "name = " << run.problem.name << "\n\n";
  }

  out << "[run]\n"
      << "iterations = " << run.iterations << "\n"
      << "n_init = " << run.n_init << "\n"
      << "delta_start = " << run.delta_start << "\n"
      << "epsilon = " << num(run.epsilon) << "\n"
      << "reduction = " << (run.reduction ? "true" : "false") << "\n"
      << "seed = " << run.seed << "\n"
      << "candidates = " << run.acquisition.candidates << "\n"
      << "samples = " << run.acquisition.samples << "\n"
      << "kernel = " << gp::to_string(run.kernel) << "\n"
      << "proxy_removed = " << (run.proxy_removed ? "true" : "false") << "\n"
      << "restarts = " << run.restarts << "\n"
      << "grid_per_dim = " << run.grid_per_dim << "\n";
  if (run.reference) {
    std::vector<double> ref(run.reference->begin(), run.reference->end());
    out << "reference = " << join(ref, num) << "\n";
  }

  const auto& sim = run.similarity;
  out << "\n[similarity]\n"
      << "eps1 = " << num(sim.eps1) << "\n"
      << "eps2 = " << num(sim.eps2) << "\n"
      << "d1 = " << similarity::to_string(sim.d1_mode) << "\n"
      << "p = " << (std::isinf(sim.p) ? std::string("inf") : num(sim.p)) << "\n"
      << "delta_tol = " << num(sim.delta_tol) << "\n"
      << "d2 = " << similarity::to_string(sim.d2_mode) << "\n";

  const auto& sweep = cfg.sweep;
  const auto uint_text = [](auto v) { return std::to_string(v); };
  out << "\n[sweep]\n"
      << "delta_start = " << join(sweep.delta_start, uint_text) << "\n"
      << "epsilon = " << join(sweep.epsilon, num) << "\n"
      << "seeds = " << join(sweep.seeds, uint_text) << "\n"
      << "baseline = " << (sweep.baseline ? "true" : "false") << "\n"
      << "output = " << sweep.output << "\n";

  const auto& study = cfg.study;
  out << "\n[study]\n"
      << "samples = " << study.samples << "\n"
      << "seeds = " << join(study.seeds, uint_text) << "\n"
      << "grid_per_dim = " << study.grid_per_dim << "\n";
  for (const auto& p : study.pairs)
    out << "pair = " << p.f.id() << " | " << p.g.id() << " | " << box_text(p.box) << "\n";
  return out.str();
}

}  // namespace maobo
