#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tensorlab/ensembles.hpp"
#include "tensorlab/kron_operator.hpp"
#include "tensorlab/norms.hpp"
#include "tensorlab/stats.hpp"

namespace tensorlab {

// ---------------------------------------------------------------------------
// Records

struct TrialRecord {
  std::size_t index = 0;   // position in the merged stream
  std::string group;       // e.g. "N=8"; empty for single-group studies
  double x = 0.0;          // sweep variable of the group (N), 0 without a sweep
  RandomSeed seed;
  std::vector<std::pair<std::string, double>> outputs;

  double output(std::string_view name) const;
};

struct CheckOutcome {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double limit = 0.0;
};

struct SweepRow {
  double x = 0.0;
  Stats stats;
};

struct ExperimentRecord {
  std::string experiment;
  RandomSeed master_seed;
  std::vector<TrialRecord> trials;
  std::vector<std::pair<std::string, Stats>> statistics;
  std::vector<std::pair<std::string, double>> scalars;
  // Plot table over the N sweep; empty for studies without one.
  std::string sweep_variable;
  std::string sweep_statistic;
  std::vector<SweepRow> sweep;
  std::vector<CheckOutcome> checks;
  double wall_seconds = 0.0;  // not part of the deterministic stream

  bool passed() const;
  const CheckOutcome* first_failure() const;
  double scalar(std::string_view name) const;
  const Stats& statistic(std::string_view name) const;
};

struct StudyContext {
  RandomSeed seed;
  int parallelism = 1;
};

// Seed of trial t in group k: derive_seed(derive_seed(master, k), t).
RandomSeed trial_seed(RandomSeed master, std::uint64_t group, std::uint64_t trial);

// ---------------------------------------------------------------------------
// Bilinear coefficients

struct BilinearCoefficients {
  Matrix alpha;
  Eigen::VectorXd lambda;  // singular values of alpha, non-increasing

  explicit BilinearCoefficients(Matrix alpha);
  int n() const { return static_cast<int>(alpha.rows()); }
};

// ---------------------------------------------------------------------------
// Studies

struct GrowthParams {
  std::vector<int> n_list;
  int order = 3;
  int trials = 20;
  Field field = Field::Real;
  SolverConfig solver;
  friend bool operator==(const GrowthParams&, const GrowthParams&) = default;
};
ExperimentRecord run_growth_study(const GrowthParams& params, const StudyContext& context);

enum class GrothendieckVariant { Real, Complex };
inline constexpr double kGrothendieckReal = 1.78222;
inline constexpr double kGrothendieckComplex = 1.40491;

/// K_G (n_1 ... n_{d-2})^{1/2} over the d-2 smallest dims.
double reference_upper_bound(int order, std::vector<int> dims,
                             GrothendieckVariant variant = GrothendieckVariant::Real);

struct BellParams {
  std::vector<int> n_list;
  int order = 3;
  int trials = 20;
  Field field = Field::Real;
  SolverConfig solver;
  GrothendieckVariant grothendieck = GrothendieckVariant::Real;
  friend bool operator==(const BellParams&, const BellParams&) = default;
};
ExperimentRecord run_bell_violation_study(const BellParams& params, const StudyContext& context);

struct GemanParams {
  std::vector<int> n_list;
  int trials = 20;
  EnsembleKind ensemble = EnsembleKind::GaussianComplex;
  friend bool operator==(const GemanParams&, const GemanParams&) = default;
};
ExperimentRecord run_geman_study(const GemanParams& params, const StudyContext& context);

enum class AlphaMode { RandomUnit, Net, WorstFound };
std::string_view to_string(AlphaMode mode);
AlphaMode parse_alpha_mode(std::string_view text);

struct BilinearParams {
  int n = 4;
  int dim = 64;  // N
  int trials = 20;
  AlphaMode alpha_mode = AlphaMode::RandomUnit;
  int alpha_count = 50;
  double epsilon = 0.1;
  EnsembleKind ensemble = EnsembleKind::GaussianComplex;
  double threshold = 4.5;
  bool diagonal_reduction = false;
  // Kronecker-free path: every alpha gets `screen_steps` Lanczos steps, then
  // alphas are refined to `lanczos.relative_tolerance` in decreasing order of
  // their screened value until the next screened value times (1 + margin)
  // falls below the best refined value.
  int screen_steps = 8;
  double screen_margin = 0.03;
  int ascent_steps = 5;
  LanczosOptions lanczos{60, 1e-6, true};
  std::size_t materialization_cap = kDefaultMaterializationCap;
  friend bool operator==(const BilinearParams&, const BilinearParams&) = default;
};
ExperimentRecord run_bilinear_bound_study(const BilinearParams& params, const StudyContext& context);

/// ||sum alpha_ij Y'_i (x) Y''_j||: dense SVD while N^2 <= kSvdSizeLimit and
/// the materialization cap allows, Lanczos on the Kronecker-free operator
/// otherwise.
double bilinear_statistic(const KroneckerSumOperator& op, const LanczosOptions& options,
                          RandomSeed seed, std::size_t cap = kDefaultMaterializationCap);

struct MomentParams {
  int dim = 6;  // N
  int n = 3;
  int p = 4;
  int trials = 1000;
  std::vector<double> lambda;
  friend bool operator==(const MomentParams&, const MomentParams&) = default;
};
ExperimentRecord run_moment_check(const MomentParams& params, const StudyContext& context);

struct LatalaParams {
  int dim = 4;  // N
  std::vector<int> ranks{1, 1, 1};
  std::vector<double> p_list{1, 2, 4, 8};
  int trials = 2000;
  Field field = Field::Real;
  double c_bound = 10.0;
  friend bool operator==(const LatalaParams&, const LatalaParams&) = default;
};
ExperimentRecord run_latala_check(const LatalaParams& params, const StudyContext& context);

struct ChevetParams {
  std::vector<int> dims{4, 4, 4};
  int trials = 50;
  SolverConfig solver;
  friend bool operator==(const ChevetParams&, const ChevetParams&) = default;
};
ExperimentRecord run_chevet_check(const ChevetParams& params, const StudyContext& context);

struct JmapParams {
  std::vector<int> n_list;
  int order = 3;
  int trials = 20;
  Field field = Field::Real;
  SolverConfig solver;
  double quality_bound = 4.0;
  friend bool operator==(const JmapParams&, const JmapParams&) = default;
};
ExperimentRecord run_jmap_study(const JmapParams& params, const StudyContext& context);

enum class OperatorFamily { Gaussian, Identity };
std::string_view to_string(OperatorFamily family);
OperatorFamily parse_operator_family(std::string_view text);

struct SymmetrizationParams {
  int dim = 8;  // N
  int operators = 4;  // M
  int trials = 2000;
  OperatorFamily family = OperatorFamily::Gaussian;
  friend bool operator==(const SymmetrizationParams&, const SymmetrizationParams&) = default;
};
ExperimentRecord symmetrization_check(const SymmetrizationParams& params, const StudyContext& context);

// Parameter validation shared by the studies and the config parser. Throws
// DomainError naming the offending field.
void validate(const GrowthParams& params);
void validate(const BellParams& params);
void validate(const GemanParams& params);
void validate(const BilinearParams& params);
void validate(const MomentParams& params);
void validate(const LatalaParams& params);
void validate(const ChevetParams& params);
void validate(const JmapParams& params);
void validate(const SymmetrizationParams& params);

}  // namespace tensorlab
