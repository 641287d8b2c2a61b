#include "tensorlab/runner.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tensorlab {

namespace {

using ordered = nlohmann::ordered_json;

ordered stats_json(const Stats& s) {
  return {{"count", s.count}, {"mean", s.mean},   {"median", s.median},
          {"standard_error", s.standard_error}, {"min", s.min}, {"max", s.max}};
}

bool write_file(const std::filesystem::path& path, const std::string& content, std::ostream& log) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (out) out << content;
  if (!out) {
    log << "error: cannot write " << path.string() << "\n";
    return false;
  }
  return true;
}

}  // namespace

ExperimentRecord run_study(const RunConfig& config) {
  const StudyContext context{config.seed, config.parallelism};
  return std::visit(
      [&](const auto& p) -> ExperimentRecord {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, GrowthParams>) return run_growth_study(p, context);
        else if constexpr (std::is_same_v<P, BellParams>) return run_bell_violation_study(p, context);
        else if constexpr (std::is_same_v<P, GemanParams>) return run_geman_study(p, context);
        else if constexpr (std::is_same_v<P, BilinearParams>) return run_bilinear_bound_study(p, context);
        else if constexpr (std::is_same_v<P, MomentParams>) return run_moment_check(p, context);
        else if constexpr (std::is_same_v<P, LatalaParams>) return run_latala_check(p, context);
        else if constexpr (std::is_same_v<P, ChevetParams>) return run_chevet_check(p, context);
        else if constexpr (std::is_same_v<P, JmapParams>) return run_jmap_study(p, context);
        else return symmetrization_check(p, context);
      },
      config.params);
}

std::string record_stream(const RunConfig& config, const ExperimentRecord& record) {
  std::ostringstream out;
  for (const auto& t : record.trials) {
    ordered line{{"type", "trial"}, {"experiment", record.experiment}, {"index", t.index},
                 {"group", t.group},  {"x", t.x},                       {"seed", t.seed.value}};
    ordered outputs = ordered::object();
    for (const auto& [name, value] : t.outputs) outputs[name] = value;
    line["outputs"] = std::move(outputs);
    out << line.dump() << "\n";
  }
  ordered summary{{"type", "summary"},
                  {"experiment", record.experiment},
                  {"seed", record.master_seed.value},
                  {"parameters", ordered::parse(serialize_parameters(config))},
                  {"trials", record.trials.size()}};
  ordered statistics = ordered::object();
  for (const auto& [name, s] : record.statistics) statistics[name] = stats_json(s);
  summary["statistics"] = std::move(statistics);
  ordered scalars = ordered::object();
  for (const auto& [name, v] : record.scalars) scalars[name] = v;
  summary["scalars"] = std::move(scalars);
  ordered checks = ordered::array();
  for (const auto& c : record.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"observed", c.observed}, {"limit", c.limit}});
  }
  summary["checks"] = std::move(checks);
  summary["passed"] = record.passed();
  out << summary.dump() << "\n";
  return out.str();
}

std::string plot_table(const ExperimentRecord& record) {
  if (record.sweep.empty()) return {};
  std::ostringstream out;
  out.precision(17);
  out << record.sweep_variable << "\tmedian\tmean\tstandard_error\n";
  for (const auto& row : record.sweep) {
    out << row.x << "\t" << row.stats.median << "\t" << row.stats.mean << "\t" << row.stats.standard_error << "\n";
  }
  return out.str();
}

std::filesystem::path output_directory(const RunConfig& config) {
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return config.output;
}

int run(const RunConfig& config, std::ostream& log) {
  ExperimentRecord record;
  try {
    record = run_study(config);
  } catch (const DomainError& e) {
    log << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ResourceError& e) {
    log << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  const auto dir = output_directory(config);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    log << "error: cannot create " << dir.string() << ": " << ec.message() << "\n";
    return kExitIo;
  }
  const std::string base = config.experiment;
  if (!write_file(dir / (base + ".jsonl"), record_stream(config, record), log)) return kExitIo;
  if (const auto table = plot_table(record); !table.empty()) {
    if (!write_file(dir / (base + ".tsv"), table, log)) return kExitIo;
  }
  const nlohmann::ordered_json timing{{"experiment", record.experiment},
                                      {"wall_seconds", record.wall_seconds},
                                      {"parallelism", config.parallelism}};
  if (!write_file(dir / (base + ".timing.json"), timing.dump() + "\n", log)) return kExitIo;

  int status = kExitOk;
  for (const auto& c : record.checks) {
    if (c.passed) continue;
    log << "assertion failed: " << c.name << " (observed " << c.observed << ", limit " << c.limit << ")\n";
    status = kExitAssertion;
  }
  if (status == kExitOk) log << record.experiment << ": " << record.checks.size() << " checks passed\n";
  return status;
}

}  // namespace tensorlab
