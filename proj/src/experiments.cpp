#include "tensorlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tensorlab/bases.hpp"
#include "tensorlab/errors.hpp"
#include "tensorlab/pair_form.hpp"
#include "tensorlab/parallel.hpp"

namespace tensorlab {

namespace {

using Outputs = std::vector<std::pair<std::string, double>>;

struct Group {
  std::string label;
  double x = 0.0;
  int trials = 0;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Runs every (group, trial) task and merges the records in index order.
template <typename Fn>
std::vector<TrialRecord> run_trials(const StudyContext& context, const std::vector<Group>& groups, Fn&& fn) {
  std::vector<std::pair<std::size_t, int>> tasks;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int t = 0; t < groups[g].trials; ++t) tasks.emplace_back(g, t);
  }
  auto outputs = parallel_map(tasks.size(), context.parallelism, [&](std::size_t i) {
    const auto [g, t] = tasks[i];
    return fn(g, trial_seed(context.seed, g, static_cast<std::uint64_t>(t)));
  });
  std::vector<TrialRecord> records(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto [g, t] = tasks[i];
    records[i].index = i;
    records[i].group = groups[g].label;
    records[i].x = groups[g].x;
    records[i].seed = trial_seed(context.seed, g, static_cast<std::uint64_t>(t));
    records[i].outputs = std::move(outputs[i]);
  }
  return records;
}

std::vector<double> column(const std::vector<TrialRecord>& trials, std::string_view group, std::string_view name) {
  std::vector<double> out;
  for (const auto& t : trials) {
    if (t.group == group) out.push_back(t.output(name));
  }
  return out;
}

std::vector<double> column(const std::vector<TrialRecord>& trials, std::string_view name) {
  std::vector<double> out;
  out.reserve(trials.size());
  for (const auto& t : trials) out.push_back(t.output(name));
  return out;
}

std::string n_label(int n) { return "N=" + std::to_string(n); }

std::vector<Group> sweep_groups(const std::vector<int>& n_list, int trials) {
  std::vector<Group> groups;
  for (int n : n_list) groups.push_back({n_label(n), static_cast<double>(n), trials});
  return groups;
}

void add_stats(ExperimentRecord& record, const std::string& group, std::initializer_list<const char*> names) {
  for (const char* name : names) {
    const auto values = group.empty() ? column(record.trials, name) : column(record.trials, group, name);
    record.statistics.emplace_back(group.empty() ? std::string(name) : group + "/" + name, summarize(values));
  }
}

void add_sweep(ExperimentRecord& record, const std::vector<int>& n_list, const char* statistic) {
  record.sweep_variable = "N";
  record.sweep_statistic = statistic;
  for (int n : n_list) {
    record.sweep.push_back({static_cast<double>(n), record.statistic(n_label(n) + "/" + statistic)});
  }
}

void add_check(ExperimentRecord& record, std::string name, bool passed, double observed, double limit) {
  record.checks.push_back({std::move(name), passed, observed, limit});
}

// observed <= limit
void add_upper_check(ExperimentRecord& record, std::string name, double observed, double limit) {
  add_check(record, std::move(name), observed <= limit, observed, limit);
}

// Largest violation of "median non-increasing within one combined standard error".
double worst_increase(const std::vector<SweepRow>& rows) {
  double worst = -INFINITY;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    const double slack = std::hypot(rows[k].stats.standard_error, rows[k + 1].stats.standard_error);
    worst = std::max(worst, rows[k + 1].stats.median - rows[k].stats.median - slack);
  }
  return worst;
}

Matrix normalized_identity(int n) {
  return Matrix::Identity(n, n) / std::sqrt(static_cast<double>(n));
}

double prod(const std::vector<int>& dims) {
  double p = 1.0;
  for (int d : dims) p *= d;
  return p;
}

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw DomainError(std::string(field) + ": " + message);
}

void validate_n_list(const std::vector<int>& n_list, int minimum) {
  require(!n_list.empty(), "N_list", "must not be empty");
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    require(n_list[k] >= minimum, "N_list", "entries must be >= " + std::to_string(minimum));
    require(k == 0 || n_list[k] > n_list[k - 1], "N_list", "must be strictly increasing");
  }
}

void validate_trials(int trials, int minimum = 1) {
  require(trials >= minimum, "trials", "must be >= " + std::to_string(minimum));
}

void validate_solver(const SolverConfig& solver) { solver.validate(); }

double pow_int(double base, int exponent) { return std::pow(base, exponent); }

}  // namespace

// ---------------------------------------------------------------------------

double TrialRecord::output(std::string_view name) const {
  for (const auto& [key, value] : outputs) {
    if (key == name) return value;
  }
  throw std::out_of_range("trial has no output named " + std::string(name));
}

bool ExperimentRecord::passed() const { return first_failure() == nullptr; }

const CheckOutcome* ExperimentRecord::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

double ExperimentRecord::scalar(std::string_view name) const {
  for (const auto& [key, value] : scalars) {
    if (key == name) return value;
  }
  throw std::out_of_range("record has no scalar named " + std::string(name));
}

const Stats& ExperimentRecord::statistic(std::string_view name) const {
  for (const auto& [key, value] : statistics) {
    if (key == name) return value;
  }
  throw std::out_of_range("record has no statistic named " + std::string(name));
}

RandomSeed trial_seed(RandomSeed master, std::uint64_t group, std::uint64_t trial) {
  return derive_seed(derive_seed(master, group), trial);
}

BilinearCoefficients::BilinearCoefficients(Matrix a) : alpha(std::move(a)) {
  if (alpha.rows() == 0 || alpha.rows() != alpha.cols()) throw DomainError("alpha must be square and non-empty");
  lambda = Eigen::JacobiSVD<Matrix>(alpha).singularValues();
}

// ---------------------------------------------------------------------------
// Validation

void validate(const GrowthParams& p) {
  validate_n_list(p.n_list, 2);
  require(p.order >= 2, "d", "must be >= 2");
  validate_trials(p.trials);
  validate_solver(p.solver);
}

void validate(const BellParams& p) {
  validate_n_list(p.n_list, 1);
  require(p.order >= 2, "d", "must be >= 2");
  validate_trials(p.trials);
  validate_solver(p.solver);
}

void validate(const GemanParams& p) {
  validate_n_list(p.n_list, 1);
  validate_trials(p.trials);
}

void validate(const BilinearParams& p) {
  require(p.n >= 1, "n", "must be >= 1");
  require(p.dim >= 1, "N", "must be >= 1");
  validate_trials(p.trials);
  require(p.alpha_count >= 1, "alpha_count", "must be >= 1");
  require(p.epsilon > 0.0 && p.epsilon < 1.0, "epsilon", "must lie in (0, 1)");
  require(p.threshold > 0.0, "threshold", "must be positive");
  require(p.screen_steps >= 1, "screen_steps", "must be >= 1");
  require(p.screen_margin >= 0.0, "screen_margin", "must be >= 0");
  require(p.ascent_steps >= 0, "ascent_steps", "must be >= 0");
  require(p.lanczos.max_steps >= 1, "lanczos_max_steps", "must be >= 1");
  require(p.lanczos.relative_tolerance > 0.0, "lanczos_tolerance", "must be positive");
  require(!p.diagonal_reduction || p.ensemble == EnsembleKind::GaussianComplex, "diagonal_reduction",
          "requires the gaussian_complex ensemble");
}

void validate(const MomentParams& p) {
  require(p.dim >= 1, "N", "must be >= 1");
  require(p.n >= 1, "n", "must be >= 1");
  require(p.p >= 2 && p.p <= 12 && p.p % 2 == 0, "p", "must be an even integer in [2, 12]");
  validate_trials(p.trials, 2);
  require(static_cast<int>(p.lambda.size()) == p.n, "lambda", "must have n entries");
  double sq = 0.0;
  for (double l : p.lambda) {
    require(std::isfinite(l), "lambda", "entries must be finite");
    sq += l * l;
  }
  require(std::abs(sq - 1.0) <= 1e-9, "lambda", "must be a unit vector");
}

void validate(const LatalaParams& p) {
  require(p.dim >= 1, "N", "must be >= 1");
  require(p.ranks.size() >= 2, "ranks", "needs one rank per mode, d >= 2");
  for (int r : p.ranks) require(r >= 1 && r <= p.dim, "ranks", "entries must lie in [1, N]");
  require(!p.p_list.empty(), "p_list", "must not be empty");
  for (double q : p.p_list) require(q >= 1.0 && std::isfinite(q), "p_list", "entries must be >= 1");
  validate_trials(p.trials, 2);
  require(p.c_bound > 0.0, "c_bound", "must be positive");
}

void validate(const ChevetParams& p) {
  require(!p.dims.empty(), "dims", "must not be empty");
  for (int n : p.dims) require(n >= 1, "dims", "entries must be >= 1");
  require(prod(p.dims) <= static_cast<double>(kDefaultMaterializationCap), "dims",
          "product exceeds the materialization cap");
  validate_trials(p.trials, 2);
  validate_solver(p.solver);
}

void validate(const JmapParams& p) {
  validate_n_list(p.n_list, 2);
  require(p.order >= 2, "d", "must be >= 2");
  validate_trials(p.trials);
  validate_solver(p.solver);
  require(p.quality_bound > 0.0, "quality_bound", "must be positive");
  const double side = pow_int(p.n_list.back(), p.order);
  require(side * side <= static_cast<double>(kDefaultMaterializationCap), "N_list",
          "bipartite reshape exceeds the materialization cap");
}

void validate(const SymmetrizationParams& p) {
  require(p.dim >= 1, "N", "must be >= 1");
  require(p.operators >= 1, "M", "must be >= 1");
  validate_trials(p.trials, 2);
}

// ---------------------------------------------------------------------------
// Growth

ExperimentRecord run_growth_study(const GrowthParams& params, const StudyContext& context) {
  validate(params);
  Stopwatch clock;
  const int d = params.order;
  ExperimentRecord record;
  record.experiment = "run_growth_study";
  record.master_seed = context.seed;
  record.trials = run_trials(context, sweep_groups(params.n_list, params.trials), [&](std::size_t g, RandomSeed seed) {
    const int n = params.n_list[g];
    const auto form = GaussianPairForm::sample(n, d, params.field, derive_seed(seed, 0));
    const auto est = injective_norm_lower(form, params.solver, derive_seed(seed, 1));
    const std::vector<Matrix> identity(static_cast<std::size_t>(d), normalized_identity(n));
    const double identity_value = std::abs(evaluate_form(form, identity));
    const double converged = static_cast<double>(std::count(est.converged.begin(), est.converged.end(), true)) /
                             static_cast<double>(est.converged.size());
    return Outputs{{"value", est.value},
                   {"value_over_n", est.value / n},
                   {"value_over_n_log", est.value / (n * std::pow(std::log(n), d / 2.0))},
                   {"identity_value", identity_value},
                   {"converged_fraction", converged}};
  });
  for (int n : params.n_list) add_stats(record, n_label(n), {"value", "value_over_n", "value_over_n_log"});
  add_sweep(record, params.n_list, "value_over_n_log");

  double worst_gap = -INFINITY;
  for (const auto& t : record.trials) {
    worst_gap = std::max(worst_gap, (t.output("identity_value") - t.output("value")) / t.output("value"));
  }
  add_upper_check(record, "identity_witness_lower_bound", worst_gap, 1e-12);
  if (record.sweep.size() > 1) {
    add_upper_check(record, "normalized_median_non_increasing", worst_increase(record.sweep), 0.0);
    double lo = INFINITY;
    double hi = 0.0;
    for (int n : params.n_list) {
      const double m = record.statistic(n_label(n) + "/value_over_n").median;
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    add_upper_check(record, "value_over_n_band", hi / lo, 4.0);
  }
  record.wall_seconds = clock.seconds();
  return record;
}

// ---------------------------------------------------------------------------
// Bell violation

double reference_upper_bound(int order, std::vector<int> dims, GrothendieckVariant variant) {
  if (order < 2 || static_cast<int>(dims.size()) != order) {
    throw DomainError("reference_upper_bound needs d >= 2 and d dims");
  }
  std::sort(dims.begin(), dims.end());
  double p = 1.0;
  for (int m = 0; m < order - 2; ++m) p *= dims[static_cast<std::size_t>(m)];
  const double kg = variant == GrothendieckVariant::Real ? kGrothendieckReal : kGrothendieckComplex;
  return kg * std::sqrt(p);
}

ExperimentRecord run_bell_violation_study(const BellParams& params, const StudyContext& context) {
  validate(params);
  Stopwatch clock;
  const int d = params.order;
  ExperimentRecord record;
  record.experiment = "run_bell_violation_study";
  record.master_seed = context.seed;
  record.trials = run_trials(context, sweep_groups(params.n_list, params.trials), [&](std::size_t g, RandomSeed seed) {
    const int n = params.n_list[g];
    const auto form = GaussianPairForm::sample(n, d, params.field, derive_seed(seed, 0));
    const double lower = min_norm_lower_rankone(form);
    const std::vector<UnitaryBasis> bases(static_cast<std::size_t>(d), weyl_basis(n));
    const DenseTensor t = epr_coefficients(form, bases);

    const bool certified = n == 2 && d == 3 && params.field == Field::Real;
    double denominator = 0.0;
    if (certified) {
      denominator = unimodular_sup_exhaustive_real(t).value;
    } else {
      const bool complex_t = t.entries().imag().cwiseAbs().maxCoeff() > 0.0;
      const Field phases = complex_t ? Field::Complex : params.field;
      denominator = unimodular_sup(t, phases, params.solver, derive_seed(seed, 1)).value;
    }
    const double injective = injective_norm_lower(form, params.solver, derive_seed(seed, 2)).value;
    const double chain = std::pow(n, d / 2.0) * injective;
    const std::vector<int> dims(static_cast<std::size_t>(d), n * n);
    return Outputs{{"lower", lower},
                   {"denominator", denominator},
                   {"ratio", lower / denominator},
                   {"certified", certified ? 1.0 : 0.0},
                   {"chain_denominator", chain},
                   {"chain_ratio", lower / chain},
                   {"reference", reference_upper_bound(d, dims, params.grothendieck)}};
  });
  for (int n : params.n_list) add_stats(record, n_label(n), {"ratio", "chain_ratio"});
  add_sweep(record, params.n_list, "ratio");

  double worst = 0.0;
  for (const auto& t : record.trials) worst = std::max(worst, t.output("ratio") / t.output("reference"));
  add_upper_check(record, "ratio_below_reference", worst, 1.0);

  if (record.sweep.size() > 1) {
    int inversions = 0;
    double deepest = 0.0;  // in units of the combined standard error
    for (std::size_t k = 0; k + 1 < record.sweep.size(); ++k) {
      const auto& a = record.sweep[k].stats;
      const auto& b = record.sweep[k + 1].stats;
      if (b.median < a.median) {
        ++inversions;
        const double se = std::hypot(a.standard_error, b.standard_error);
        deepest = std::max(deepest, se > 0.0 ? (a.median - b.median) / se : INFINITY);
      }
    }
    add_check(record, "median_ratio_non_decreasing", inversions <= 1 && deepest <= 1.0, deepest, 1.0);
    record.scalars.emplace_back("inversions", inversions);
  }
  for (std::size_t g = 0; g < params.n_list.size(); ++g) {
    if (params.n_list[g] == 2 && d == 3 && params.field == Field::Real) {
      record.scalars.emplace_back("certified_baseline_median", record.statistic(n_label(2) + "/ratio").median);
    }
  }
  record.wall_seconds = clock.seconds();
  return record;
}

// ---------------------------------------------------------------------------
// Geman

ExperimentRecord run_geman_study(const GemanParams& params, const StudyContext& context) {
  validate(params);
  Stopwatch clock;
  ExperimentRecord record;
  record.experiment = "run_geman_study";
  record.master_seed = context.seed;
  record.trials = run_trials(context, sweep_groups(params.n_list, params.trials), [&](std::size_t g, RandomSeed seed) {
    const Matrix y = sample_matrix(params.n_list[g], params.ensemble, seed);
    return Outputs{{"norm", spectral_norm(y)}};
  });
  for (int n : params.n_list) {
    add_stats(record, n_label(n), {"norm"});
    record.scalars.emplace_back("epsilon/" + n_label(n), record.statistic(n_label(n) + "/norm").mean - 2.0);
  }
  add_sweep(record, params.n_list, "norm");
  if (params.n_list.size() > 1) {
    double worst = -INFINITY;
    for (std::size_t k = 0; k + 1 < record.sweep.size(); ++k) {
      const auto& a = record.sweep[k].stats;
      const auto& b = record.sweep[k + 1].stats;
      const double slack = std::hypot(a.standard_error, b.standard_error);
      worst = std::max(worst, std::abs(b.mean - 2.0) - std::abs(a.mean - 2.0) - slack);
    }
    add_upper_check(record, "epsilon_shrinking", worst, 0.0);
  }
  record.wall_seconds = clock.seconds();
  return record;
}

// ---------------------------------------------------------------------------
// Bilinear bound

std::string_view to_string(AlphaMode mode) {
  switch (mode) {
    case AlphaMode::RandomUnit: return "random_unit";
    case AlphaMode::Net: return "net";
    case AlphaMode::WorstFound: return "worst_found";
  }
  return "?";
}

AlphaMode parse_alpha_mode(std::string_view text) {
  for (auto m : {AlphaMode::RandomUnit, AlphaMode::Net, AlphaMode::WorstFound}) {
    if (to_string(m) == text) return m;
  }
  throw DomainError("unknown alpha mode '" + std::string(text) + "'");
}

namespace {

bool dense_path(int dim, std::size_t cap) {
  const auto big = static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);
  return big <= static_cast<std::size_t>(kSvdSizeLimit) && big * big <= cap;
}

// Coordinate vectors, the normalized identity and all-ones, and the
// normalized Fourier matrix.
std::vector<Matrix> probe_alphas(int n) {
  std::vector<Matrix> out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      out.push_back(e);
    }
  }
  out.push_back(Matrix::Identity(n, n) / std::sqrt(static_cast<double>(n)));
  out.push_back(Matrix::Constant(n, n, 1.0 / n));
  Matrix f(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) f(i, j) = std::polar(1.0 / n, 2.0 * M_PI * i * j / n);
  }
  out.push_back(f);
  return out;
}

std::vector<Matrix> random_alphas(int n, int count, RandomSeed seed) {
  Engine engine = make_engine(seed);
  std::vector<Matrix> out;
  for (int a = 0; a < count; ++a) {
    Matrix alpha = draw_gaussian(engine, n, n, Field::Complex);
    out.push_back(alpha / alpha.norm());
  }
  return out;
}

// Top singular triple; dense SVD when small, Lanczos otherwise.
TopSingular top_triple(const KroneckerSumOperator& op, const LanczosOptions& options, RandomSeed seed,
                       std::size_t cap) {
  const int dim = op.local_dim();
  if (!dense_path(dim, cap)) return top_singular_value(op, options, seed);
  Eigen::BDCSVD<Matrix> svd(op.dense(cap), Eigen::ComputeThinU | Eigen::ComputeThinV);
  TopSingular out;
  out.value = svd.singularValues()(0);
  out.left = svd.matrixU().col(0).reshaped<Eigen::RowMajor>(dim, dim);
  out.right = svd.matrixV().col(0).reshaped<Eigen::RowMajor>(dim, dim);
  out.converged = true;
  return out;
}

struct AlphaScan {
  std::vector<double> values;
  int refined = 0;
};

// Statistic of every alpha. On the Lanczos path the short screening runs are
// Ritz values, so they never exceed the refined value of the same alpha.
AlphaScan scan_alphas(const BilinearParams& p, const std::vector<Matrix>& alphas, const std::vector<Matrix>& left,
                      const std::vector<Matrix>& right, RandomSeed seed) {
  AlphaScan scan;
  const auto lanczos_seed = [&](std::size_t a) { return derive_seed(seed, a); };
  if (dense_path(p.dim, p.materialization_cap)) {
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      scan.values.push_back(spectral_norm(KroneckerSumOperator(alphas[a], left, right).dense(p.materialization_cap)));
    }
    return scan;
  }
  LanczosOptions screen = p.lanczos;
  screen.max_steps = std::min(p.screen_steps, p.lanczos.max_steps);
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    scan.values.push_back(top_singular_value(KroneckerSumOperator(alphas[a], left, right), screen, lanczos_seed(a)).value);
  }
  std::vector<std::size_t> order(alphas.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return scan.values[i] > scan.values[j]; });
  double best = 0.0;
  for (std::size_t a : order) {
    if (scan.refined > 0 && scan.values[a] * (1.0 + p.screen_margin) < best) break;
    const double v = top_singular_value(KroneckerSumOperator(alphas[a], left, right), p.lanczos, lanczos_seed(a)).value;
    scan.values[a] = std::max(scan.values[a], v);
    best = std::max(best, scan.values[a]);
    ++scan.refined;
  }
  return scan;
}

}  // namespace

double bilinear_statistic(const KroneckerSumOperator& op, const LanczosOptions& options, RandomSeed seed,
                          std::size_t cap) {
  if (dense_path(op.local_dim(), cap)) return spectral_norm(op.dense(cap));
  return top_singular_value(op, options, seed).value;
}

ExperimentRecord run_bilinear_bound_study(const BilinearParams& params, const StudyContext& context) {
  validate(params);
  Stopwatch clock;
  const int n = params.n;
  const int dim = params.dim;
  ExperimentRecord record;
  record.experiment = "run_bilinear_bound_study";
  record.master_seed = context.seed;
  const std::vector<Group> groups{{"", 0.0, params.trials}};
  record.trials = run_trials(context, groups, [&](std::size_t, RandomSeed seed) {
    std::vector<Matrix> left;
    std::vector<Matrix> right;
    for (int i = 0; i < n; ++i) left.push_back(sample_matrix(dim, params.ensemble, derive_seed(seed, i)));
    for (int j = 0; j < n; ++j) right.push_back(sample_matrix(dim, params.ensemble, derive_seed(seed, n + j)));
    double left_hs = 0.0;
    double right_hs = 0.0;
    for (int i = 0; i < n; ++i) {
      left_hs += left[static_cast<std::size_t>(i)].squaredNorm();
      right_hs += right[static_cast<std::size_t>(i)].squaredNorm();
    }
    const double normalization = std::min(left_hs, right_hs) / (static_cast<double>(n) * dim);

    const RandomSeed alpha_seed = derive_seed(seed, 2 * n);
    const RandomSeed lanczos_seed = derive_seed(seed, 2 * n + 1);
    const std::vector<Matrix> alphas = params.alpha_mode == AlphaMode::Net
                                           ? probe_alphas(n)
                                           : random_alphas(n, params.alpha_count, alpha_seed);
    AlphaScan scan = scan_alphas(params, alphas, left, right, lanczos_seed);
    const auto best_it = std::max_element(scan.values.begin(), scan.values.end());
    double best = *best_it;
    const auto best_index = static_cast<double>(best_it - scan.values.begin());

    if (params.alpha_mode == AlphaMode::WorstFound) {
      // Ascent on alpha: with (u, v) the top singular pair of A(alpha), the unit
      // alpha maximizing |<A(alpha) v, u>| is conj(c) / ||c||.
      Matrix alpha = alphas[static_cast<std::size_t>(best_index)];
      const RandomSeed ascent_seed = derive_seed(seed, 2 * n + 2);
      for (int s = 0; s < params.ascent_steps; ++s) {
        const KroneckerSumOperator op(alpha, left, right);
        const TopSingular top = top_triple(op, params.lanczos, derive_seed(ascent_seed, s), params.materialization_cap);
        best = std::max(best, top.value);
        const Matrix c = op.alpha_gradient(top.right, top.left);
        if (c.norm() == 0.0) break;
        alpha = c.conjugate() / c.norm();
      }
      const KroneckerSumOperator op(alpha, left, right);
      best = std::max(best, bilinear_statistic(op, params.lanczos, derive_seed(ascent_seed, params.ascent_steps),
                                               params.materialization_cap));
    }

    double sum = 0.0;
    for (double v : scan.values) sum += v;
    Outputs out{{"max_statistic", best},
                {"mean_statistic", sum / static_cast<double>(scan.values.size())},
                {"best_alpha_index", best_index},
                {"refined_alphas", static_cast<double>(scan.refined)},
                {"normalization", normalization}};
    if (params.diagonal_reduction) {
      // Same samples, alpha replaced by diag(lambda); equal in distribution
      // by unitary invariance of complex Gaussian tuples.
      const BilinearCoefficients coeffs(alphas.front());
      const Matrix diag = coeffs.lambda.cast<Complex>().asDiagonal();
      const RandomSeed diag_seed = derive_seed(seed, 2 * n + 3);
      const LanczosOptions exact{params.lanczos.max_steps, params.lanczos.relative_tolerance, params.lanczos.single_precision};
      out.emplace_back("first_alpha_statistic",
                       bilinear_statistic(KroneckerSumOperator(alphas.front(), left, right), exact, diag_seed,
                                          params.materialization_cap));
      out.emplace_back("diagonal_statistic", bilinear_statistic(KroneckerSumOperator(diag, left, right), exact,
                                                                diag_seed, params.materialization_cap));
    }
    return out;
  });

  add_stats(record, "", {"max_statistic", "mean_statistic", "normalization"});
  const Stats& maxima = record.statistic("max_statistic");
  const Stats& norms = record.statistic("normalization");
  record.scalars.emplace_back("empirical_constant", maxima.max);
  add_check(record, "normalization_lower", norms.min >= 1.0 - params.epsilon, norms.min, 1.0 - params.epsilon);
  if (dim >= 64) {
    add_upper_check(record, "normalization_band", std::max(norms.max - 1.0, 1.0 - norms.min), 0.1);
  }
  if (params.ensemble == EnsembleKind::GaussianComplex || params.ensemble == EnsembleKind::GaussianReal) {
    add_upper_check(record, "threshold", maxima.max, params.threshold);
  }
  if (params.diagonal_reduction) {
    add_stats(record, "", {"first_alpha_statistic", "diagonal_statistic"});
    const Stats& a = record.statistic("first_alpha_statistic");
    const Stats& b = record.statistic("diagonal_statistic");
    add_upper_check(record, "diagonal_reduction", std::abs(a.mean - b.mean),
                    2.0 * std::hypot(a.standard_error, b.standard_error));
  }
  record.wall_seconds = clock.seconds();
  return record;
}

// ---------------------------------------------------------------------------
// Moments

ExperimentRecord run_moment_check(const MomentParams& params, const StudyContext& context) {
  validate(params);
  Stopwatch clock;
  const int n = params.n;
  const int dim = params.dim;
  const int p = params.p;
  const auto trace_power = [p](const Matrix& m) {
    const Eigen::VectorXd s = Eigen::BDCSVD<Matrix>(m).singularValues();
    return s.array().pow(p).sum();
  };
  ExperimentRecord record;
  record.experiment = "run_moment_check";
  record.master_seed = context.seed;
  Matrix diag = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) diag(j, j) = params.lambda[static_cast<std::size_t>(j)];
  const std::vector<Group> groups{{"", 0.0, params.trials}};
  record.trials = run_trials(context, groups, [&](std::size_t, RandomSeed seed) {
    std::vector<Matrix> left;
    std::vector<Matrix> right;
    for (int i = 0; i < n; ++i) left.push_back(sample_gaussian_matrix(dim, EnsembleKind::GaussianComplex, derive_seed(seed, i)));
    for (int j = 0; j < n; ++j) right.push_back(sample_gaussian_matrix(dim, EnsembleKind::GaussianComplex, derive_seed(seed, n + j)));
    Matrix combo = Matrix::Zero(dim, dim);
    for (int j = 0; j < n; ++j) combo += params.lambda[static_cast<std::size_t>(j)] * left[static_cast<std::size_t>(j)];
    return Outputs{{"trace_z", trace_power(KroneckerSumOperator(diag, left, right).dense())},
                   {"trace_left", trace_power(left.front())},
                   {"trace_right", trace_power(right.front())},
                   {"trace_combination", trace_power(combo)}};
  });
  add_stats(record, "", {"trace_z", "trace_left", "trace_right", "trace_combination"});
  const Stats& z = record.statistic("trace_z");
  const Stats& l = record.statistic("trace_left");
  const Stats& r = record.statistic("trace_right");
  const Stats& c = record.statistic("trace_combination");
  const double right_side = l.mean * r.mean;
  const double right_se = product_standard_error(l, r);
  record.scalars.emplace_back("left_side", z.mean);
  record.scalars.emplace_back("right_side", right_side);
  add_upper_check(record, "moment_inequality", z.mean - right_side, 2.0 * std::hypot(z.standard_error, right_se));
  add_upper_check(record, "unitary_invariance", std::abs(c.mean - r.mean), 2.0 * std::hypot(c.standard_error, r.standard_error));
  if (p == 2) {
    add_upper_check(record, "second_moment", std::abs(z.mean - static_cast<double>(dim) * dim), 3.0 * z.standard_error);
  }
  record.wall_seconds = clock.seconds();
  return record;
}

// ---------------------------------------------------------------------------
// Latala

ExperimentRecord run_latala_check(const LatalaParams& params, const StudyContext& context) {
  validate(params);
  Stopwatch clock;
  const int d = static_cast<int>(params.ranks.size());
  std::vector<Matrix> projections;
  const RandomSeed projection_seed = derive_seed(context.seed, 1000);
  double hs_product = 1.0;
  for (int m = 0; m < d; ++m) {
    const int r = params.ranks[static_cast<std::size_t>(m)];
    projections.push_back(sample_projection(params.dim, r, derive_seed(projection_seed, m), params.field));
    hs_product *= std::sqrt(static_cast<double>(r));
  }
  const ModeMatrices mats(projections);
  ExperimentRecord record;
  record.experiment = "run_latala_check";
  record.master_seed = context.seed;
  const std::vector<Group> groups{{"", 0.0, params.trials}};
  record.trials = run_trials(context, groups, [&](std::size_t, RandomSeed seed) {
    const auto form = GaussianPairForm::sample(params.dim, d, params.field, seed);
    return Outputs{{"abs_z", std::abs(evaluate_form(form, mats))}};
  });
  add_stats(record, "", {"abs_z"});
  const auto samples = column(record.trials, "abs_z");
  std::vector<double> p_sorted = params.p_list;
  std::sort(p_sorted.begin(), p_sorted.end());
  double fitted = 0.0;
  double worst_drop = -INFINITY;
  double previous = 0.0;
  for (std::size_t k = 0; k < p_sorted.size(); ++k) {
    const double q = p_sorted[k];
    const double lp = empirical_lp_norm(samples, q);
    const double c = lp / (std::sqrt(q) * hs_product + q);
    fitted = std::max(fitted, c);
    if (k > 0) worst_drop = std::max(worst_drop, (previous - lp) / previous);
    previous = lp;
    std::string tag = std::to_string(q);
    tag.erase(tag.find_last_not_of('0') + 1);
    if (tag.back() == '.') tag.pop_back();
    record.scalars.emplace_back("lp/p=" + tag, lp);
    record.scalars.emplace_back("c/p=" + tag, c);
  }
  record.scalars.emplace_back("fitted_c", fitted);
  add_upper_check(record, "fitted_c_bounded", fitted, params.c_bound);
  if (p_sorted.size() > 1) add_upper_check(record, "lp_monotone", worst_drop, 1e-12);
  record.wall_seconds = clock.seconds();
  return record;
}

// ---------------------------------------------------------------------------
// Chevet

ExperimentRecord run_chevet_check(const ChevetParams& params, const StudyContext& context) {
  validate(params);
  Stopwatch clock;
  const int d = static_cast<int>(params.dims.size());
  double bound = 0.0;
  for (int n : params.dims) bound += std::sqrt(static_cast<double>(n));
  bound *= std::sqrt(static_cast<double>(d));
  const auto size = static_cast<int>(prod(params.dims));
  ExperimentRecord record;
  record.experiment = "run_chevet_check";
  record.master_seed = context.seed;
  const std::vector<Group> groups{{"", 0.0, params.trials}};
  record.trials = run_trials(context, groups, [&](std::size_t, RandomSeed seed) {
    const Vector entries = sample_gaussian_vector(size, EnsembleKind::GaussianReal, derive_seed(seed, 0));
    const DenseTensor g(params.dims, entries, Field::Real);
    double estimate = 0.0;
    if (d == 1) {
      estimate = entries.norm();
    } else {
      estimate = injective_norm_lower(g, params.solver, derive_seed(seed, 1)).value;
    }
    Outputs out{{"estimate", estimate}, {"bound", bound}, {"squared_norm", entries.squaredNorm()}};
    if (d == 2) {
      const Matrix m = entries.reshaped<Eigen::RowMajor>(params.dims[0], params.dims[1]);
      const double svd = spectral_norm_svd(m);
      out.emplace_back("svd_value", svd);
      out.emplace_back("svd_gap", std::abs(estimate - svd) / svd);
    }
    return out;
  });
  add_stats(record, "", {"estimate", "squared_norm"});
  add_upper_check(record, "chevet_bound", record.statistic("estimate").mean, bound);
  const Stats& sq = record.statistic("squared_norm");
  add_upper_check(record, "hs_mean", std::abs(sq.mean - prod(params.dims)), 3.0 * sq.standard_error);
  if (d == 2) {
    add_stats(record, "", {"svd_gap"});
    add_upper_check(record, "svd_agreement", record.statistic("svd_gap").max, 1e-8);
  }
  record.wall_seconds = clock.seconds();
  return record;
}

// ---------------------------------------------------------------------------
// J-map

ExperimentRecord run_jmap_study(const JmapParams& params, const StudyContext& context) {
  validate(params);
  Stopwatch clock;
  const int d = params.order;
  ExperimentRecord record;
  record.experiment = "run_jmap_study";
  record.master_seed = context.seed;
  record.trials = run_trials(context, sweep_groups(params.n_list, params.trials), [&](std::size_t g, RandomSeed seed) {
    const int n = params.n_list[g];
    const auto form = GaussianPairForm::sample(n, d, params.field, derive_seed(seed, 0));
    const double numerator = spectral_norm(reshape_bipartite(form));
    const double denominator = injective_norm_lower(form, params.solver, derive_seed(seed, 1)).value;
    const double ratio = numerator / denominator;
    const double upper = pow_int(n, d - 1);
    const double product = form.g().norm() * form.g_prime().norm();
    Outputs out{{"numerator", numerator},
                {"denominator", denominator},
                {"ratio", ratio},
                {"quality", ratio / upper},
                {"normalized_ratio", ratio / (upper * std::pow(std::log(n), -d / 2.0))},
                {"rank_one_gap", std::abs(numerator - product) / product}};
    if (d == 2) {
      const DenseTensor t = to_dense(form);
      const Matrix m = t.entries().reshaped<Eigen::RowMajor>(n * n, n * n);
      const double certified = spectral_norm(m);
      out.emplace_back("certified_denominator", certified);
      out.emplace_back("certified_ratio", numerator / certified);
    }
    return out;
  });
  for (int n : params.n_list) add_stats(record, n_label(n), {"ratio", "quality", "normalized_ratio"});
  add_sweep(record, params.n_list, "ratio");

  double rank_one = 0.0;
  double quality = 0.0;
  for (const auto& t : record.trials) {
    rank_one = std::max(rank_one, t.output("rank_one_gap"));
    quality = std::max(quality, t.output("quality"));
  }
  add_upper_check(record, "numerator_rank_one", rank_one, 1e-10);
  add_upper_check(record, "quality_factor", quality, params.quality_bound);

  // Growth between consecutive N must sit between the two fitted rates.
  double worst = -INFINITY;
  for (std::size_t k = 0; k + 1 < record.sweep.size(); ++k) {
    const double n0 = record.sweep[k].x;
    const double n1 = record.sweep[k + 1].x;
    const auto& a = record.sweep[k].stats;
    const auto& b = record.sweep[k + 1].stats;
    const double rel_se = std::hypot(a.standard_error / a.median, b.standard_error / b.median);
    const double growth = b.median / a.median;
    const double high = std::pow(n1 / n0, d - 1);
    const double low = high * std::pow(std::log(n1) / std::log(n0), -d / 2.0);
    worst = std::max({worst, growth / high - 1.0 - rel_se, low / growth - 1.0 - rel_se});
  }
  if (record.sweep.size() > 1) add_upper_check(record, "ratio_growth_rate", worst, 0.0);
  record.wall_seconds = clock.seconds();
  return record;
}

// ---------------------------------------------------------------------------
// Symmetrization

std::string_view to_string(OperatorFamily family) {
  return family == OperatorFamily::Gaussian ? "gaussian" : "identity";
}

OperatorFamily parse_operator_family(std::string_view text) {
  if (text == "gaussian") return OperatorFamily::Gaussian;
  if (text == "identity") return OperatorFamily::Identity;
  throw DomainError("unknown operator family '" + std::string(text) + "'");
}

ExperimentRecord symmetrization_check(const SymmetrizationParams& params, const StudyContext& context) {
  validate(params);
  Stopwatch clock;
  const int dim = params.dim;
  std::vector<Eigen::MatrixXd> ops;
  double max_hs = 0.0;
  const RandomSeed op_seed = derive_seed(context.seed, 1000);
  for (int i = 0; i < params.operators; ++i) {
    ops.push_back(params.family == OperatorFamily::Identity
                      ? Eigen::MatrixXd::Identity(dim, dim)
                      : Eigen::MatrixXd(sample_gaussian_matrix(dim, EnsembleKind::GaussianReal, derive_seed(op_seed, i)).real()));
    max_hs = std::max(max_hs, ops.back().squaredNorm());
  }
  ExperimentRecord record;
  record.experiment = "symmetrization_check";
  record.master_seed = context.seed;
  const std::vector<Group> groups{{"", 0.0, params.trials}};
  record.trials = run_trials(context, groups, [&](std::size_t, RandomSeed seed) {
    const Eigen::VectorXd g = sample_gaussian_vector(dim, EnsembleKind::GaussianReal, derive_seed(seed, 0)).real();
    const Eigen::VectorXd h = sample_gaussian_vector(dim, EnsembleKind::GaussianReal, derive_seed(seed, 1)).real();
    double sup_z = 0.0;
    double sup_zhat = 0.0;
    double sup_diff = 0.0;
    double sup_quad = 0.0;
    double zhat_first = 0.0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const Eigen::VectorXd ug = ops[i] * g;
      const Eigen::VectorXd uh = ops[i] * h;
      const double hs = ops[i].squaredNorm();
      const double zhat = ug.squaredNorm() - hs;
      const double zhat_prime = uh.squaredNorm() - hs;
      if (i == 0) zhat_first = zhat;
      sup_z = std::max(sup_z, std::abs(ug.dot(uh)));
      sup_zhat = std::max(sup_zhat, std::abs(zhat));
      sup_diff = std::max(sup_diff, std::abs(zhat - zhat_prime));
      sup_quad = std::max(sup_quad, ug.squaredNorm());
    }
    return Outputs{{"sup_z", sup_z},
                   {"sup_zhat", sup_zhat},
                   {"sup_difference", sup_diff},
                   {"sup_quadratic", sup_quad},
                   {"zhat_first", zhat_first}};
  });
  add_stats(record, "", {"sup_z", "sup_zhat", "sup_difference", "sup_quadratic", "zhat_first"});

  const auto z = column(record.trials, "sup_z");
  const auto zhat = column(record.trials, "sup_zhat");
  const auto diff = column(record.trials, "sup_difference");
  const auto quad = column(record.trials, "sup_quadratic");
  const auto powered = [](const std::vector<double>& v, double p, double scale) {
    std::vector<double> out;
    out.reserve(v.size());
    for (double x : v) out.push_back(std::pow(scale * x, p));
    return out;
  };
  for (int p : {1, 2, 4}) {
    const auto a = powered(diff, p, 1.0);
    const auto b = powered(z, p, 2.0);
    std::vector<double> paired(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) paired[i] = a[i] - b[i];
    const Stats s = summarize(paired);
    add_upper_check(record, "difference_identity_p" + std::to_string(p), std::abs(s.mean), 3.0 * s.standard_error);
  }
  for (int p : {1, 2}) {
    const Stats sz = summarize(powered(z, p, 1.0));
    const Stats sh = summarize(powered(zhat, p, 1.0));
    const double lz = std::pow(sz.mean, 1.0 / p);
    const double lh = std::pow(sh.mean, 1.0 / p);
    const double se = std::hypot(lp_norm_standard_error(sz, p), lp_norm_standard_error(sh, p));
    const std::string tag = "_p" + std::to_string(p);
    record.scalars.emplace_back("lp_sup_z" + tag, lz);
    record.scalars.emplace_back("lp_sup_zhat" + tag, lh);
    add_upper_check(record, "two_sided_lower" + tag, 0.5 * lh - lz, 3.0 * std::hypot(0.5 * lp_norm_standard_error(sh, p), lp_norm_standard_error(sz, p)));
    add_upper_check(record, "two_sided_upper" + tag, lz - lh, 3.0 * se);
  }
  {
    const Stats sq = summarize(powered(quad, 2, 1.0));
    const Stats sz = summarize(powered(z, 2, 1.0));
    const double lhs = std::sqrt(sq.mean);
    const double rhs = 2.0 * std::sqrt(sz.mean) + max_hs;
    const double se = std::hypot(lp_norm_standard_error(sq, 2), 2.0 * lp_norm_standard_error(sz, 2));
    add_upper_check(record, "quadratic_bound_p2", lhs - rhs, 3.0 * se);
  }
  record.wall_seconds = clock.seconds();
  return record;
}

}  // namespace tensorlab
