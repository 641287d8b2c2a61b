#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "tensorlab/errors.hpp"
#include "tensorlab/experiments.hpp"

namespace tensorlab {

using StudyParams = std::variant<GrowthParams, BellParams, GemanParams, BilinearParams, MomentParams,
                                 LatalaParams, ChevetParams, JmapParams, SymmetrizationParams>;

struct RunConfig {
  std::string experiment;
  StudyParams params;
  RandomSeed seed;
  std::string output = "results";  // directory for record streams and plot tables
  int parallelism = 1;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Malformed text (with line and column) or a field that fails validation
/// (with the field name leading the message).
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// One top-level JSON object. Solver settings nest under "solver"; omitted
/// optional fields take their defaults; unknown keys are rejected.
RunConfig parse_config(std::string_view text);

/// Canonical JSON with every field spelled out; parse_config reads it back
/// to an equal RunConfig.
std::string serialize_config(const RunConfig& config);

/// JSON of the study parameters alone (no output path or parallelism), as
/// embedded in record streams.
std::string serialize_parameters(const RunConfig& config);

struct ExperimentInfo {
  std::string_view name;
  std::string_view anchor;
};

std::span<const ExperimentInfo> experiment_registry();

/// One line per study: name, then its claim.
std::string list_experiments();

}  // namespace tensorlab
