#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "tensorlab/errors.hpp"
#include "tensorlab/experiments.hpp"
#include "tensorlab/pair_form.hpp"

using namespace tensorlab;

namespace {

const CheckOutcome& check(const ExperimentRecord& r, std::string_view name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range(std::string(name));
}

void expect_all_checks_pass(const ExperimentRecord& r) {
  for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.name << " observed " << c.observed << " limit " << c.limit;
}

std::vector<double> outputs(const ExperimentRecord& r, std::string_view name) {
  std::vector<double> out;
  for (const auto& t : r.trials) out.push_back(t.output(name));
  return out;
}

}  // namespace

// =============================================================================
// Helpers
// =============================================================================

TEST(ReferenceUpperBound, UsesSmallestDims) {
  EXPECT_NEAR(reference_upper_bound(3, {4, 4, 4}), kGrothendieckReal * 2.0, 1e-15);
  EXPECT_NEAR(reference_upper_bound(2, {9, 9}), kGrothendieckReal, 1e-15);
  EXPECT_NEAR(reference_upper_bound(4, {7, 5, 3, 2}), kGrothendieckReal * std::sqrt(6.0), 1e-14);
  EXPECT_NEAR(reference_upper_bound(3, {16, 16, 16}, GrothendieckVariant::Complex), kGrothendieckComplex * 4.0, 1e-14);
  EXPECT_THROW(reference_upper_bound(3, {4, 4}), DomainError);
}

TEST(BilinearCoefficients, SingularValuesCarryHilbertSchmidtNorm) {
  const Matrix alpha = sample_gaussian_matrix(5, EnsembleKind::GaussianComplex, RandomSeed{1});
  const BilinearCoefficients c(alpha);
  EXPECT_NEAR(c.lambda.squaredNorm(), alpha.squaredNorm(), 1e-12);
  for (Eigen::Index k = 0; k + 1 < c.lambda.size(); ++k) EXPECT_GE(c.lambda(k), c.lambda(k + 1));
  EXPECT_THROW(BilinearCoefficients(Matrix(2, 3)), DomainError);
}

TEST(TrialSeed, NestedDerivation) {
  const RandomSeed m{42};
  EXPECT_EQ(trial_seed(m, 2, 5), derive_seed(derive_seed(m, 2), 5));
}

// =============================================================================
// Growth and Bell
// =============================================================================

TEST(GrowthStudy, OrderTwoMatchesSvd) {
  GrowthParams p;
  p.n_list = {2, 4, 8, 16};
  p.order = 2;
  p.trials = 3;
  const RandomSeed master{5};
  const auto r = run_growth_study(p, {master, 1});
  ASSERT_EQ(r.trials.size(), 12u);
  for (const auto& t : r.trials) {
    const int n = static_cast<int>(t.x);
    const auto form = GaussianPairForm::sample(n, 2, Field::Real, derive_seed(t.seed, 0));
    const Matrix m = to_dense(form).entries().reshaped<Eigen::RowMajor>(n * n, n * n);
    const double svd = Eigen::BDCSVD<Matrix>(m).singularValues()(0);
    EXPECT_NEAR(t.output("value"), svd, 1e-6 * svd) << t.group;
  }
  EXPECT_EQ(r.sweep.size(), 4u);
  EXPECT_TRUE(check(r, "identity_witness_lower_bound").passed);
}

TEST(GrowthStudy, RejectsBadParameters) {
  GrowthParams p;
  p.n_list = {};
  EXPECT_THROW(run_growth_study(p, {RandomSeed{1}, 1}), DomainError);
  p.n_list = {4};
  p.order = 1;
  EXPECT_THROW(run_growth_study(p, {RandomSeed{1}, 1}), DomainError);
}

TEST(BellStudy, TrivialDimensionHasUnitRatios) {
  BellParams p;
  p.n_list = {1};
  p.trials = 5;
  const auto r = run_bell_violation_study(p, {RandomSeed{3}, 1});
  for (const auto& t : r.trials) {
    EXPECT_NEAR(t.output("ratio"), 1.0, 1e-12);
    EXPECT_NEAR(t.output("chain_ratio"), 1.0, 1e-12);
  }
}

TEST(BellStudy, CertifiedBaselineIsFrozen) {
  BellParams p;
  p.n_list = {2};
  p.trials = 10;
  const auto r = run_bell_violation_study(p, {RandomSeed{11}, 1});
  for (const auto& t : r.trials) EXPECT_EQ(t.output("certified"), 1.0);
  EXPECT_NEAR(r.scalar("certified_baseline_median"), 0.67223404956337585, 1e-6);
  EXPECT_TRUE(check(r, "ratio_below_reference").passed);
}

// =============================================================================
// Random matrices
// =============================================================================

TEST(GemanStudy, ScalarCaseIsRayleighMean) {
  GemanParams p;
  p.n_list = {1};
  p.trials = 20000;
  const auto r = run_geman_study(p, {RandomSeed{7}, 1});
  const Stats& s = r.statistic("N=1/norm");
  EXPECT_LE(std::abs(s.mean - std::sqrt(std::numbers::pi) / 2.0), 3.0 * s.standard_error);
}

TEST(BilinearStudy, SingleTermIsProductOfNorms) {
  BilinearParams p;
  p.n = 1;
  p.dim = 6;
  p.trials = 4;
  p.alpha_count = 3;
  const auto r = run_bilinear_bound_study(p, {RandomSeed{8}, 1});
  for (const auto& t : r.trials) {
    const Matrix y1 = sample_matrix(6, p.ensemble, derive_seed(t.seed, 0));
    const Matrix y2 = sample_matrix(6, p.ensemble, derive_seed(t.seed, 1));
    const double expected = Eigen::BDCSVD<Matrix>(y1).singularValues()(0) * Eigen::BDCSVD<Matrix>(y2).singularValues()(0);
    EXPECT_NEAR(t.output("max_statistic"), expected, 1e-10 * expected);
  }
}

TEST(BilinearStudy, LanczosPathAgreesWithDensePath) {
  BilinearParams p;
  p.n = 3;
  p.dim = 12;
  p.trials = 3;
  p.alpha_count = 10;
  const auto dense = run_bilinear_bound_study(p, {RandomSeed{9}, 1});
  p.materialization_cap = 0;
  p.lanczos = LanczosOptions{60, 1e-10, false};
  const auto lanczos = run_bilinear_bound_study(p, {RandomSeed{9}, 1});
  for (std::size_t k = 0; k < dense.trials.size(); ++k) {
    const double a = dense.trials[k].output("max_statistic");
    const double b = lanczos.trials[k].output("max_statistic");
    EXPECT_LE(b, a * (1.0 + 1e-10));
    EXPECT_GE(b, a * (1.0 - p.screen_margin));
  }
}

TEST(BilinearStudy, WorstFoundDominatesRandomProbes) {
  BilinearParams p;
  p.n = 2;
  p.dim = 8;
  p.trials = 3;
  p.alpha_count = 5;
  const auto random = run_bilinear_bound_study(p, {RandomSeed{10}, 1});
  p.alpha_mode = AlphaMode::WorstFound;
  const auto worst = run_bilinear_bound_study(p, {RandomSeed{10}, 1});
  for (std::size_t k = 0; k < random.trials.size(); ++k) {
    EXPECT_GE(worst.trials[k].output("max_statistic"), random.trials[k].output("max_statistic"));
  }
}

TEST(BilinearStudy, RigidThresholdFails) {
  BilinearParams p;
  p.n = 2;
  p.dim = 8;
  p.trials = 2;
  p.alpha_count = 2;
  p.threshold = 0.1;
  const auto r = run_bilinear_bound_study(p, {RandomSeed{12}, 1});
  EXPECT_FALSE(r.passed());
  ASSERT_NE(r.first_failure(), nullptr);
  EXPECT_FALSE(check(r, "threshold").passed);
  EXPECT_EQ(check(r, "threshold").limit, 0.1);
}

TEST(MomentCheck, SecondMomentIsExact) {
  MomentParams p;
  p.p = 2;
  p.trials = 2000;
  p.lambda = std::vector<double>(3, 1.0 / std::sqrt(3.0));
  const auto r = run_moment_check(p, {RandomSeed{13}, 1});
  expect_all_checks_pass(r);
  EXPECT_TRUE(check(r, "second_moment").passed);
}

TEST(MomentCheck, SingleTermFactorizes) {
  MomentParams p;
  p.n = 1;
  p.p = 4;
  p.trials = 50;
  p.lambda = {1.0};
  const auto r = run_moment_check(p, {RandomSeed{14}, 1});
  for (const auto& t : r.trials) {
    const double expected = t.output("trace_left") * t.output("trace_right");
    EXPECT_NEAR(t.output("trace_z"), expected, 1e-10 * expected);
  }
}

TEST(MomentCheck, RejectsOddPowersAndBadWeights) {
  MomentParams p;
  p.p = 3;
  p.lambda = std::vector<double>(3, 1.0 / std::sqrt(3.0));
  EXPECT_THROW(run_moment_check(p, {RandomSeed{1}, 1}), DomainError);
  p.p = 4;
  p.lambda = {1.0, 1.0, 1.0};
  EXPECT_THROW(run_moment_check(p, {RandomSeed{1}, 1}), DomainError);
}

// =============================================================================
// Gaussian chaos
// =============================================================================

TEST(LatalaCheck, RankOneMomentsAreGaussianProducts) {
  // Z is a product of two independent standard normals: ||Z||_p = (E|X|^p)^{2/p}.
  LatalaParams p;
  p.p_list = {1, 2, 4};
  p.trials = 20000;
  const auto r = run_latala_check(p, {RandomSeed{15}, 1});
  const auto abs_moment = [](double q) {
    return std::pow(2.0, q / 2.0) * std::tgamma((q + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
  };
  EXPECT_NEAR(r.scalar("lp/p=1"), std::pow(abs_moment(1), 2.0), 0.04 * std::pow(abs_moment(1), 2.0));
  EXPECT_NEAR(r.scalar("lp/p=2"), 1.0, 0.04);
  EXPECT_NEAR(r.scalar("lp/p=4"), std::sqrt(3.0), 0.08 * std::sqrt(3.0));
  expect_all_checks_pass(r);
}

TEST(LatalaCheck, LawDoesNotDependOnAmbientDimension) {
  // With rank-r projections Z = <a, b> for independent standard Gaussian a, b
  // in R^{r^3}, so ||Z||_2 = r^{3/2} for every N.
  for (int n : {4, 8}) {
    LatalaParams p;
    p.dim = n;
    p.ranks = {2, 2, 2};
    p.p_list = {2};
    p.trials = 4000;
    const auto r = run_latala_check(p, {RandomSeed{16u + n}, 1});
    EXPECT_NEAR(r.scalar("lp/p=2"), std::sqrt(8.0), 0.05 * std::sqrt(8.0)) << n;
  }
}

TEST(ChevetCheck, OrderOneIsVectorNorm) {
  ChevetParams p;
  p.dims = {9};
  p.trials = 500;
  const auto r = run_chevet_check(p, {RandomSeed{17}, 1});
  expect_all_checks_pass(r);
  EXPECT_EQ(check(r, "chevet_bound").limit, 3.0);
  EXPECT_LT(r.statistic("estimate").mean, 3.0);
}

TEST(ChevetCheck, OrderTwoAgreesWithSvd) {
  ChevetParams p;
  p.dims = {5, 7};
  p.trials = 20;
  const auto r = run_chevet_check(p, {RandomSeed{18}, 1});
  expect_all_checks_pass(r);
  EXPECT_LE(r.statistic("svd_gap").max, 1e-8);
}

TEST(ChevetCheck, OrderThreeSatisfiesBound) {
  ChevetParams p;
  p.trials = 10;
  const auto r = run_chevet_check(p, {RandomSeed{19}, 1});
  expect_all_checks_pass(r);
  EXPECT_NEAR(check(r, "chevet_bound").limit, std::sqrt(3.0) * 6.0, 1e-12);
}

TEST(JmapStudy, OrderTwoDenominatorIsCertified) {
  JmapParams p;
  p.n_list = {2, 3, 4};
  p.order = 2;
  p.trials = 4;
  const auto r = run_jmap_study(p, {RandomSeed{20}, 1});
  for (const auto& t : r.trials) {
    EXPECT_NEAR(t.output("denominator"), t.output("certified_denominator"), 1e-6 * t.output("certified_denominator"));
    EXPECT_LE(t.output("rank_one_gap"), 1e-10);
  }
  EXPECT_TRUE(check(r, "quality_factor").passed);
}

TEST(SymmetrizationCheck, IdentityOperatorMoments) {
  // With U = I: hat Z = ||g||^2 - N and E (hat Z - hat Z')^2 = 4N = E (2 <g, h>)^2.
  SymmetrizationParams p;
  p.dim = 6;
  p.operators = 1;
  p.trials = 8000;
  p.family = OperatorFamily::Identity;
  const auto r = symmetrization_check(p, {RandomSeed{21}, 1});
  std::vector<double> diff_sq;
  for (double v : outputs(r, "sup_difference")) diff_sq.push_back(v * v);
  const Stats d = summarize(diff_sq);
  EXPECT_LE(std::abs(d.mean - 24.0), 3.0 * d.standard_error);
  const Stats& z = r.statistic("zhat_first");
  EXPECT_LE(std::abs(z.mean), 3.0 * z.standard_error);
  expect_all_checks_pass(r);
}

// =============================================================================
// Determinism
// =============================================================================

TEST(Determinism, ParallelismDoesNotChangeTrials) {
  GrowthParams p;
  p.n_list = {2, 3};
  p.trials = 6;
  const auto a = run_growth_study(p, {RandomSeed{22}, 1});
  const auto b = run_growth_study(p, {RandomSeed{22}, 4});
  ASSERT_EQ(a.trials.size(), b.trials.size());
  for (std::size_t k = 0; k < a.trials.size(); ++k) {
    EXPECT_EQ(a.trials[k].seed, b.trials[k].seed);
    EXPECT_EQ(a.trials[k].outputs, b.trials[k].outputs);
  }
}
