#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "tensorlab/config.hpp"

namespace tensorlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitAssertion = 2;
inline constexpr int kExitIo = 3;

// Overrides RunConfig::output when set.
inline constexpr const char* kOutputDirEnv = "TENSORLAB_OUTPUT_DIR";

ExperimentRecord run_study(const RunConfig& config);

/// One JSON object per trial, then one summary object; newline terminated.
/// Depends only on the parameters and seed, never on timing or parallelism.
std::string record_stream(const RunConfig& config, const ExperimentRecord& record);

/// Tab-separated N, median, mean, standard_error; empty without a sweep.
std::string plot_table(const ExperimentRecord& record);

std::filesystem::path output_directory(const RunConfig& config);

/// Runs the study and writes <dir>/<experiment>.jsonl, <experiment>.tsv (for
/// sweeps) and <experiment>.timing.json. Diagnostics go to `log`.
int run(const RunConfig& config, std::ostream& log);

}  // namespace tensorlab
