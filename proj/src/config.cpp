#include "tensorlab/config.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tensorlab {

namespace {

using nlohmann::json;

constexpr std::array<ExperimentInfo, 9> kRegistry{{
    {"run_growth_study", "injective norm growth, E||T|| <= C N (log N)^{3/2}"},
    {"run_bell_violation_study", "tripartite Bell violation, ||t||_min / ||t||_v grows like n^{1/4} (log n)^{-3/2}"},
    {"run_geman_study", "Geman limit, E||Y^(N)|| = 2 + eps(N) with eps(N) -> 0"},
    {"run_bilinear_bound_study", "bilinear bound, limsup ||sum alpha_ij Y'_i (x) Y''_j|| <= 4 (sum |alpha_ij|^2)^{1/2}"},
    {"run_moment_check", "moment comparison, E tr|Z(alpha)|^p <= (E tr|Y|^p)^2"},
    {"run_latala_check", "Latala bound, ||Z||_p <= c (p^{1/2} prod ||R||_2 + p prod ||R||_op)"},
    {"run_chevet_check", "Chevet inequality, E||G||_v <= d^{1/2} sum_j n_j^{1/2}"},
    {"run_jmap_study", "identification map, c N^{d-1} (log N)^{-d/2} <= ||J|| <= N^{d-1}"},
    {"symmetrization_check", "symmetrization, hat Z_i - hat Z'_i has the law of 2 Z_i"},
}};

const std::set<std::string> kCommonKeys{"experiment", "seed", "output", "parallelism"};

std::set<std::string> study_keys(std::string_view experiment) {
  if (experiment == "run_growth_study") return {"N_list", "d", "trials", "field", "solver"};
  if (experiment == "run_bell_violation_study") return {"N_list", "d", "trials", "field", "solver", "grothendieck"};
  if (experiment == "run_geman_study") return {"N_list", "trials", "ensemble"};
  if (experiment == "run_bilinear_bound_study") {
    return {"n", "N", "trials", "alpha_mode", "alpha_count", "epsilon", "ensemble", "threshold",
            "diagonal_reduction", "screen_steps", "screen_margin", "ascent_steps", "lanczos",
            "materialization_cap"};
  }
  if (experiment == "run_moment_check") return {"N", "n", "p", "trials", "lambda"};
  if (experiment == "run_latala_check") return {"N", "ranks", "p_list", "trials", "field", "c_bound"};
  if (experiment == "run_chevet_check") return {"dims", "trials", "solver"};
  if (experiment == "run_jmap_study") return {"N_list", "d", "trials", "field", "solver", "quality_bound"};
  return {"N", "M", "trials", "operators"};
}

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ConfigError(field + ": " + message);
}

// Typed access to one JSON object; `prefix` names nested objects in errors.
class Fields {
 public:
  Fields(const json& object, std::string prefix) : object_(object), prefix_(std::move(prefix)) {}

  void only(const std::set<std::string>& allowed) const {
    for (const auto& item : object_.items()) {
      if (!allowed.contains(item.key())) fail(name(item.key()), "unknown key");
    }
  }

  const json* find(const std::string& key) const {
    const auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  const json& required(const std::string& key) const {
    const json* v = find(key);
    if (!v) fail(name(key), "required field is missing");
    return *v;
  }

  int integer(const std::string& key, int fallback) const {
    const json* v = find(key);
    return v ? as_int(*v, key) : fallback;
  }

  int integer(const std::string& key) const { return as_int(required(key), key); }

  double number(const std::string& key, double fallback) const {
    const json* v = find(key);
    return v ? as_double(*v, key) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) const {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(name(key), "expected true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& key, std::string fallback) const {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(name(key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<int> integers(const std::string& key) const {
    const json& v = required(key);
    return integer_list(v, key);
  }

  std::vector<int> integers(const std::string& key, std::vector<int> fallback) const {
    const json* v = find(key);
    return v ? integer_list(*v, key) : fallback;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_array()) fail(name(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : *v) out.push_back(as_double(x, key));
    return out;
  }

  std::uint64_t unsigned_integer(const std::string& key) const {
    const json& v = required(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail(name(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string name(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

 private:
  std::vector<int> integer_list(const json& v, const std::string& key) const {
    if (!v.is_array()) fail(name(key), "expected an array of integers");
    std::vector<int> out;
    for (const auto& x : v) out.push_back(as_int(x, key));
    return out;
  }

  int as_int(const json& v, const std::string& key) const {
    if (!v.is_number_integer()) fail(name(key), "expected an integer");
    if (v.is_number_unsigned()) {
      const auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) fail(name(key), "integer out of range");
      return static_cast<int>(u);
    }
    const auto i = v.get<std::int64_t>();
    if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) {
      fail(name(key), "integer out of range");
    }
    return static_cast<int>(i);
  }

  double as_double(const json& v, const std::string& key) const {
    if (!v.is_number()) fail(name(key), "expected a number");
    return v.get<double>();
  }

  const json& object_;
  std::string prefix_;
};

template <typename T, typename Parse>
T enum_field(const Fields& f, const std::string& key, T fallback, Parse parse) {
  const json* v = f.find(key);
  if (!v) return fallback;
  if (!v->is_string()) fail(f.name(key), "expected a string");
  try {
    return parse(v->get<std::string>());
  } catch (const DomainError& e) {
    fail(f.name(key), e.what());
  }
}

SolverConfig read_solver(const Fields& f) {
  SolverConfig solver;
  const json* v = f.find("solver");
  if (!v) return solver;
  if (!v->is_object()) fail("solver", "expected an object");
  const Fields s(*v, "solver");
  s.only({"restarts", "max_iterations", "relative_tolerance"});
  solver.restarts = s.integer("restarts", solver.restarts);
  solver.max_iterations = s.integer("max_iterations", solver.max_iterations);
  solver.relative_tolerance = s.number("relative_tolerance", solver.relative_tolerance);
  return solver;
}

LanczosOptions read_lanczos(const Fields& f, LanczosOptions options) {
  const json* v = f.find("lanczos");
  if (!v) return options;
  if (!v->is_object()) fail("lanczos", "expected an object");
  const Fields l(*v, "lanczos");
  l.only({"max_steps", "relative_tolerance", "single_precision"});
  options.max_steps = l.integer("max_steps", options.max_steps);
  options.relative_tolerance = l.number("relative_tolerance", options.relative_tolerance);
  options.single_precision = l.boolean("single_precision", options.single_precision);
  return options;
}

Field read_field(const Fields& f, Field fallback) { return enum_field(f, "field", fallback, parse_field); }

StudyParams read_params(const std::string& experiment, const Fields& f) {
  if (experiment == "run_growth_study") {
    GrowthParams p;
    p.n_list = f.integers("N_list");
    p.order = f.integer("d", p.order);
    p.trials = f.integer("trials");
    p.field = read_field(f, p.field);
    p.solver = read_solver(f);
    return p;
  }
  if (experiment == "run_bell_violation_study") {
    BellParams p;
    p.n_list = f.integers("N_list");
    p.order = f.integer("d", p.order);
    p.trials = f.integer("trials");
    p.field = read_field(f, p.field);
    p.solver = read_solver(f);
    p.grothendieck = enum_field(f, "grothendieck", p.grothendieck, [](std::string_view t) {
      if (t == "real") return GrothendieckVariant::Real;
      if (t == "complex") return GrothendieckVariant::Complex;
      throw DomainError("expected \"real\" or \"complex\"");
    });
    return p;
  }
  if (experiment == "run_geman_study") {
    GemanParams p;
    p.n_list = f.integers("N_list");
    p.trials = f.integer("trials");
    p.ensemble = enum_field(f, "ensemble", p.ensemble, parse_ensemble);
    return p;
  }
  if (experiment == "run_bilinear_bound_study") {
    BilinearParams p;
    p.n = f.integer("n");
    p.dim = f.integer("N");
    p.trials = f.integer("trials");
    p.alpha_mode = enum_field(f, "alpha_mode", p.alpha_mode, parse_alpha_mode);
    p.alpha_count = f.integer("alpha_count", p.alpha_count);
    p.epsilon = f.number("epsilon", p.epsilon);
    p.ensemble = enum_field(f, "ensemble", p.ensemble, parse_ensemble);
    p.threshold = f.number("threshold", p.threshold);
    p.diagonal_reduction = f.boolean("diagonal_reduction", p.diagonal_reduction);
    p.screen_steps = f.integer("screen_steps", p.screen_steps);
    p.screen_margin = f.number("screen_margin", p.screen_margin);
    p.ascent_steps = f.integer("ascent_steps", p.ascent_steps);
    p.lanczos = read_lanczos(f, p.lanczos);
    if (const json* cap = f.find("materialization_cap")) {
      if (!cap->is_number_unsigned()) fail("materialization_cap", "expected a non-negative integer");
      p.materialization_cap = cap->get<std::size_t>();
    }
    return p;
  }
  if (experiment == "run_moment_check") {
    MomentParams p;
    p.dim = f.integer("N");
    p.n = f.integer("n");
    p.p = f.integer("p");
    p.trials = f.integer("trials");
    const double uniform = p.n > 0 ? 1.0 / std::sqrt(static_cast<double>(p.n)) : 0.0;
    p.lambda = f.numbers("lambda", std::vector<double>(static_cast<std::size_t>(std::max(p.n, 0)), uniform));
    return p;
  }
  if (experiment == "run_latala_check") {
    LatalaParams p;
    p.dim = f.integer("N");
    p.ranks = f.integers("ranks");
    p.p_list = f.numbers("p_list", p.p_list);
    p.trials = f.integer("trials");
    p.field = read_field(f, p.field);
    p.c_bound = f.number("c_bound", p.c_bound);
    return p;
  }
  if (experiment == "run_chevet_check") {
    ChevetParams p;
    p.dims = f.integers("dims");
    p.trials = f.integer("trials");
    p.solver = read_solver(f);
    return p;
  }
  if (experiment == "run_jmap_study") {
    JmapParams p;
    p.n_list = f.integers("N_list");
    p.order = f.integer("d", p.order);
    p.trials = f.integer("trials");
    p.field = read_field(f, p.field);
    p.solver = read_solver(f);
    p.quality_bound = f.number("quality_bound", p.quality_bound);
    return p;
  }
  SymmetrizationParams p;
  p.dim = f.integer("N");
  p.operators = f.integer("M");
  p.trials = f.integer("trials");
  p.family = enum_field(f, "operators", p.family, parse_operator_family);
  return p;
}

json solver_json(const SolverConfig& s) {
  return {{"restarts", s.restarts}, {"max_iterations", s.max_iterations}, {"relative_tolerance", s.relative_tolerance}};
}

json params_json(const StudyParams& params) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, GrowthParams>) {
          return {{"N_list", p.n_list}, {"d", p.order}, {"trials", p.trials},
                  {"field", to_string(p.field)}, {"solver", solver_json(p.solver)}};
        } else if constexpr (std::is_same_v<P, BellParams>) {
          return {{"N_list", p.n_list}, {"d", p.order}, {"trials", p.trials}, {"field", to_string(p.field)},
                  {"solver", solver_json(p.solver)},
                  {"grothendieck", p.grothendieck == GrothendieckVariant::Real ? "real" : "complex"}};
        } else if constexpr (std::is_same_v<P, GemanParams>) {
          return {{"N_list", p.n_list}, {"trials", p.trials}, {"ensemble", to_string(p.ensemble)}};
        } else if constexpr (std::is_same_v<P, BilinearParams>) {
          return {{"n", p.n},
                  {"N", p.dim},
                  {"trials", p.trials},
                  {"alpha_mode", to_string(p.alpha_mode)},
                  {"alpha_count", p.alpha_count},
                  {"epsilon", p.epsilon},
                  {"ensemble", to_string(p.ensemble)},
                  {"threshold", p.threshold},
                  {"diagonal_reduction", p.diagonal_reduction},
                  {"screen_steps", p.screen_steps},
                  {"screen_margin", p.screen_margin},
                  {"ascent_steps", p.ascent_steps},
                  {"lanczos",
                   {{"max_steps", p.lanczos.max_steps},
                    {"relative_tolerance", p.lanczos.relative_tolerance},
                    {"single_precision", p.lanczos.single_precision}}},
                  {"materialization_cap", p.materialization_cap}};
        } else if constexpr (std::is_same_v<P, MomentParams>) {
          return {{"N", p.dim}, {"n", p.n}, {"p", p.p}, {"trials", p.trials}, {"lambda", p.lambda}};
        } else if constexpr (std::is_same_v<P, LatalaParams>) {
          return {{"N", p.dim}, {"ranks", p.ranks}, {"p_list", p.p_list}, {"trials", p.trials},
                  {"field", to_string(p.field)}, {"c_bound", p.c_bound}};
        } else if constexpr (std::is_same_v<P, ChevetParams>) {
          return {{"dims", p.dims}, {"trials", p.trials}, {"solver", solver_json(p.solver)}};
        } else if constexpr (std::is_same_v<P, JmapParams>) {
          return {{"N_list", p.n_list}, {"d", p.order}, {"trials", p.trials}, {"field", to_string(p.field)},
                  {"solver", solver_json(p.solver)}, {"quality_bound", p.quality_bound}};
        } else {
          return {{"N", p.dim}, {"M", p.operators}, {"trials", p.trials}, {"operators", to_string(p.family)}};
        }
      },
      params);
}

std::string position(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

std::span<const ExperimentInfo> experiment_registry() { return kRegistry; }

std::string list_experiments() {
  std::ostringstream out;
  for (const auto& info : kRegistry) out << info.name << "\t" << info.anchor << "\n";
  return out.str();
}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    if (const auto colon = what.find(": "); colon != std::string::npos) what = what.substr(colon + 2);
    throw ConfigError("parse error at " + position(text, e.byte) + ": " + what);
  }
  if (!root.is_object()) throw ConfigError("config: expected a single top-level object");
  const Fields f(root, "");

  RunConfig config;
  const json& experiment = f.required("experiment");
  if (!experiment.is_string()) fail("experiment", "expected a string");
  config.experiment = experiment.get<std::string>();
  const auto registry = experiment_registry();
  if (std::none_of(registry.begin(), registry.end(), [&](const auto& e) { return e.name == config.experiment; })) {
    fail("experiment", "unknown experiment '" + config.experiment + "'");
  }
  std::set<std::string> allowed = study_keys(config.experiment);
  allowed.insert(kCommonKeys.begin(), kCommonKeys.end());
  f.only(allowed);

  config.seed = RandomSeed{f.unsigned_integer("seed")};
  config.output = f.text("output", config.output);
  config.parallelism = f.integer("parallelism", config.parallelism);
  if (config.parallelism < 1) fail("parallelism", "must be >= 1");
  config.params = read_params(config.experiment, f);
  try {
    std::visit([](const auto& p) { validate(p); }, config.params);
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return config;
}

std::string serialize_parameters(const RunConfig& config) {
  json out = params_json(config.params);
  out["experiment"] = config.experiment;
  out["seed"] = config.seed.value;
  return out.dump();
}

std::string serialize_config(const RunConfig& config) {
  json out = params_json(config.params);
  out["experiment"] = config.experiment;
  out["seed"] = config.seed.value;
  out["output"] = config.output;
  out["parallelism"] = config.parallelism;
  return out.dump(2);
}

}  // namespace tensorlab
