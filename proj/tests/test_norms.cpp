#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "tensorlab/errors.hpp"
#include "tensorlab/norms.hpp"

using namespace tensorlab;

namespace {

DenseTensor random_tensor(std::vector<int> dims, Field field, std::uint64_t seed) {
  std::size_t size = 1;
  for (int d : dims) size *= static_cast<std::size_t>(d);
  return DenseTensor(std::move(dims), sample_gaussian_vector(static_cast<int>(size), gaussian_kind(field), RandomSeed{seed}),
                     field);
}

DenseTensor sign_tensor(std::vector<int> dims, std::uint64_t seed) {
  DenseTensor t = random_tensor(dims, Field::Real, seed);
  Vector e = t.entries();
  for (Eigen::Index k = 0; k < e.size(); ++k) e[k] = e[k].real() >= 0.0 ? 1.0 : -1.0;
  return DenseTensor(std::move(dims), std::move(e), Field::Real);
}

Matrix as_matrix(const DenseTensor& t) {
  return t.entries().reshaped<Eigen::RowMajor>(t.dims()[0], t.dims()[1]);
}

}  // namespace

// =============================================================================
// Matrix norms
// =============================================================================

TEST(SpectralNorm, KnownValues) {
  EXPECT_NEAR(spectral_norm(Matrix::Identity(5, 5)), 1.0, 1e-14);
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 3.0, 1.0, -4.0;
  EXPECT_NEAR(spectral_norm(d), 4.0, 1e-14);
  EXPECT_NEAR(spectral_norm_power(d), 4.0, 1e-10);
}

TEST(SpectralNorm, PowerIterationMatchesSvd) {
  const Matrix m = sample_gaussian_matrix(64, EnsembleKind::GaussianComplex, RandomSeed{1});
  EXPECT_NEAR(spectral_norm_power(m, 1e-14), spectral_norm_svd(m), 1e-8);
}

TEST(S21Quasinorm, RankOneIsOperatorNorm) {
  const Vector u = sample_gaussian_vector(6, EnsembleKind::GaussianComplex, RandomSeed{2});
  const Vector v = sample_gaussian_vector(6, EnsembleKind::GaussianComplex, RandomSeed{3});
  const Matrix m = u * v.adjoint();
  EXPECT_NEAR(s21_quasinorm(m), u.norm() * v.norm(), 1e-10);
}

TEST(S21Quasinorm, IdentityIsHarmonicHalfSum) {
  EXPECT_NEAR(s21_quasinorm(Matrix::Identity(4, 4)), 2.784457050376173, 1e-12);
}

TEST(S21Quasinorm, HilbertSchmidtChain) {
  // ||M||_{2,1} <= sqrt(H_r) ||M||_HS <= 2 sqrt(log2 r + 1) ||M||_HS.
  for (int trial = 0; trial < 20; ++trial) {
    const int r = 2 + 3 * trial;
    const Matrix m = sample_gaussian_matrix(r, EnsembleKind::GaussianComplex, RandomSeed{100u + trial});
    double harmonic = 0.0;
    for (int j = 1; j <= r; ++j) harmonic += 1.0 / j;
    const double s21 = s21_quasinorm(m);
    EXPECT_LE(s21, std::sqrt(harmonic) * m.norm() * (1.0 + 1e-12));
    EXPECT_LE(std::sqrt(harmonic), 2.0 * std::sqrt(std::log2(static_cast<double>(r)) + 1.0));
  }
}

// =============================================================================
// Injective norm
// =============================================================================

TEST(InjectiveNorm, RankOneTensor) {
  const Vector a = sample_gaussian_vector(3, EnsembleKind::GaussianReal, RandomSeed{4});
  const Vector b = sample_gaussian_vector(4, EnsembleKind::GaussianReal, RandomSeed{5});
  const Vector c = sample_gaussian_vector(2, EnsembleKind::GaussianReal, RandomSeed{6});
  Vector e(24);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 2; ++k) e[(i * 4 + j) * 2 + k] = a[i] * b[j] * c[k];
  const DenseTensor t({3, 4, 2}, e, Field::Real);
  const auto r = injective_norm_lower(t, SolverConfig{}, RandomSeed{7});
  EXPECT_NEAR(r.value, a.norm() * b.norm() * c.norm(), 1e-9);
}

TEST(InjectiveNorm, OrderTwoIsSpectralNorm) {
  for (auto field : {Field::Real, Field::Complex}) {
    for (int trial = 0; trial < 10; ++trial) {
      const DenseTensor t = random_tensor({5, 7}, field, 200u + trial);
      const auto r = injective_norm_lower(t, SolverConfig{4, 2000, 1e-14}, RandomSeed{300u + trial});
      EXPECT_NEAR(r.value, spectral_norm_svd(as_matrix(t)), 1e-8);
    }
  }
}

TEST(InjectiveNorm, DiagonalTensorAgreesWithGrid) {
  Vector e = Vector::Zero(8);
  e[0] = 3.0;
  e[7] = 1.0;
  const DenseTensor t({2, 2, 2}, e, Field::Real);
  // sup of |3 x1 y1 z1 + x2 y2 z2| over unit circles, sampled on a grid.
  double grid = 0.0;
  const int steps = 60;
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j)
      for (int k = 0; k < steps; ++k) {
        const double a = std::numbers::pi * i / steps;
        const double b = std::numbers::pi * j / steps;
        const double c = std::numbers::pi * k / steps;
        grid = std::max(grid, std::abs(3.0 * std::cos(a) * std::cos(b) * std::cos(c) +
                                       std::sin(a) * std::sin(b) * std::sin(c)));
      }
  const auto r = injective_norm_lower(t, SolverConfig{}, RandomSeed{8});
  EXPECT_NEAR(grid, 3.0, 1e-12);
  EXPECT_NEAR(r.value, 3.0, 1e-9);
}

TEST(InjectiveNorm, ZeroTensor) {
  const auto r = injective_norm_lower(DenseTensor::zeros({3, 3, 3}, Field::Real), SolverConfig{}, RandomSeed{9});
  EXPECT_EQ(r.value, 0.0);
}

TEST(InjectiveNorm, WitnessCertifiesValue) {
  const DenseTensor t = random_tensor({4, 4, 4}, Field::Complex, 10);
  const auto r = injective_norm_lower(t, SolverConfig{}, RandomSeed{11});
  ASSERT_EQ(r.witness.size(), 3u);
  std::vector<Vector> vecs;
  for (const auto& w : r.witness) {
    EXPECT_NEAR(w.norm(), 1.0, 1e-12);
    vecs.push_back(w.col(0));
  }
  EXPECT_NEAR(std::abs(t.contract(vecs)), r.value, 1e-12 * r.value);
  EXPECT_LE(r.value, t.frobenius_norm() * (1.0 + 1e-12));
  EXPECT_EQ(r.restarts_used, SolverConfig{}.restarts);
}

TEST(InjectiveNorm, ScaleEquivariant) {
  const DenseTensor t = random_tensor({3, 4, 5}, Field::Real, 12);
  const auto a = injective_norm_lower(t, SolverConfig{}, RandomSeed{13});
  const auto b = injective_norm_lower(t.scaled(-2.5), SolverConfig{}, RandomSeed{13});
  EXPECT_NEAR(b.value, 2.5 * a.value, 1e-9 * a.value);
}

TEST(InjectiveNorm, PairFormOrderTwoMatchesDense) {
  const auto form = GaussianPairForm::sample(2, 2, Field::Real, RandomSeed{14});
  const auto implicit = injective_norm_lower(form, SolverConfig{}, RandomSeed{15});
  const auto dense = injective_norm_lower(to_dense(form), SolverConfig{}, RandomSeed{15});
  EXPECT_NEAR(implicit.value, dense.value, 1e-8);
  EXPECT_NEAR(implicit.value, spectral_norm_svd(as_matrix(to_dense(form))), 1e-8);
}

TEST(SolverConfig, RejectsInvalidSettings) {
  EXPECT_THROW((SolverConfig{0, 10, 1e-9}.validate()), DomainError);
  EXPECT_THROW((SolverConfig{1, 0, 1e-9}.validate()), DomainError);
  EXPECT_THROW((SolverConfig{1, 10, 0.0}.validate()), DomainError);
}

// =============================================================================
// Unimodular supremum
// =============================================================================

TEST(UnimodularSup, AllOnes) {
  Vector e = Vector::Ones(27);
  const DenseTensor t({3, 3, 3}, e, Field::Real);
  EXPECT_NEAR(unimodular_sup(t, Field::Real, SolverConfig{}, RandomSeed{1}).value, 27.0, 1e-12);
  EXPECT_NEAR(unimodular_sup(t, Field::Complex, SolverConfig{}, RandomSeed{1}).value, 27.0, 1e-12);
}

TEST(UnimodularSup, SingleEntry) {
  DenseTensor t = DenseTensor::zeros({2, 3, 4}, Field::Real);
  Vector e = t.entries();
  e[5] = -1.75;
  t = DenseTensor({2, 3, 4}, e, Field::Real);
  EXPECT_NEAR(unimodular_sup(t, Field::Real, SolverConfig{}, RandomSeed{2}).value, 1.75, 1e-12);
}

TEST(UnimodularSup, HeuristicMatchesExhaustiveOnSignTensors) {
  for (int trial = 0; trial < 10; ++trial) {
    const DenseTensor t = sign_tensor({3, 3, 3}, 50u + trial);
    const double exact = unimodular_sup_exhaustive_real(t).value;
    const double found = unimodular_sup(t, Field::Real, SolverConfig{64, 500, 1e-9}, RandomSeed{60u + trial}).value;
    EXPECT_EQ(found, exact);
  }
}

TEST(UnimodularSup, ExhaustiveMatchesBruteForce) {
  for (int trial = 0; trial < 5; ++trial) {
    const DenseTensor t = random_tensor({2, 2, 2}, Field::Real, 70u + trial);
    double brute = 0.0;
    for (int mask = 0; mask < 64; ++mask) {
      Complex total = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k) {
            const int bits[3] = {i, 2 + j, 4 + k};
            double sign = 1.0;
            for (int b : bits) sign *= ((mask >> b) & 1) ? -1.0 : 1.0;
            total += sign * t[static_cast<std::size_t>((i * 2 + j) * 2 + k)];
          }
      brute = std::max(brute, std::abs(total));
    }
    const auto r = unimodular_sup_exhaustive_real(t);
    EXPECT_NEAR(r.value, brute, 1e-12);
    EXPECT_NEAR(unimodular_objective(t, r.witness), r.value, 1e-12);
  }
}

TEST(UnimodularSup, CauchySchwarzEnvelope) {
  for (auto field : {Field::Real, Field::Complex}) {
    const DenseTensor t = random_tensor({4, 4, 4}, field, 80);
    const double v = unimodular_sup(t, field, SolverConfig{}, RandomSeed{81}).value;
    EXPECT_GE(v, t.frobenius_norm());
    EXPECT_LE(v, 8.0 * t.frobenius_norm());
  }
}

TEST(UnimodularSup, RealFieldRejectsComplexTensor) {
  const DenseTensor t = random_tensor({2, 2, 2}, Field::Complex, 82);
  EXPECT_THROW(unimodular_sup(t, Field::Real, SolverConfig{}, RandomSeed{1}), DomainError);
}

// =============================================================================
// Minimal norm and projections
// =============================================================================

TEST(MinNorm, BasisVectors) {
  const GaussianPairForm form(2, 3, Vector::Unit(8, 3), Vector::Unit(8, 5), Field::Real);
  EXPECT_EQ(min_norm_lower_rankone(form), 1.0);
}

TEST(MinNorm, EqualsReshapeSpectralNorm) {
  for (int trial = 0; trial < 5; ++trial) {
    const auto form = GaussianPairForm::sample(3, 2, Field::Complex, RandomSeed{90u + trial});
    EXPECT_NEAR(min_norm_lower_rankone(form), spectral_norm_svd(reshape_bipartite(form)), 1e-10);
  }
}

TEST(ProjectionSupremum, FullRankIsIdentityValue) {
  const int n = 3;
  const auto form = GaussianPairForm::sample(n, 3, Field::Real, RandomSeed{20});
  const std::array<int, 3> ranks{n, n, n};
  const auto r = projection_supremum_mc(form, ranks, 4, SolverConfig{}, RandomSeed{21});
  const double expected = std::abs((form.g().array() * form.g_prime().array()).sum()) / std::pow(n, 1.5);
  EXPECT_NEAR(r.estimate.value, expected, 1e-10);
}

TEST(ProjectionSupremum, RefinementNeverLosesGround) {
  const auto form = GaussianPairForm::sample(4, 3, Field::Complex, RandomSeed{22});
  const std::array<int, 3> ranks{2, 1, 3};
  const auto r = projection_supremum_mc(form, ranks, 16, SolverConfig{}, RandomSeed{23});
  EXPECT_GE(r.estimate.value, r.best_sample_value * (1.0 - 1e-12));
}

TEST(ProjectionSupremum, RejectsBadRanks) {
  const auto form = GaussianPairForm::sample(3, 2, Field::Real, RandomSeed{24});
  EXPECT_THROW(projection_supremum_mc(form, std::array<int, 2>{0, 1}, 4, SolverConfig{}, RandomSeed{1}), DomainError);
  EXPECT_THROW(projection_supremum_mc(form, std::array<int, 2>{1, 4}, 4, SolverConfig{}, RandomSeed{1}), DomainError);
  EXPECT_THROW(projection_supremum_mc(form, std::array<int, 1>{1}, 4, SolverConfig{}, RandomSeed{1}), DomainError);
}

TEST(ProjectionSupremum, RankOneOrderTwoAgreesWithGrid) {
  // With P_m = v_m v_m^T, Z = (a . v_2)(b . v_2) for a = G^T v_1, b = G'^T v_1,
  // and the maximum over unit v_2 is (|a||b| + |a . b|) / 2.
  const int n = 3;
  const auto form = GaussianPairForm::sample(n, 2, Field::Real, RandomSeed{25});
  const Eigen::MatrixXd g = form.g().real().reshaped<Eigen::RowMajor>(n, n);
  const Eigen::MatrixXd gp = form.g_prime().real().reshaped<Eigen::RowMajor>(n, n);
  double grid = 0.0;
  const int steps = 400;
  for (int i = 0; i <= steps; ++i) {
    const double theta = std::numbers::pi * i / steps;
    for (int j = 0; j < 2 * steps; ++j) {
      const double phi = std::numbers::pi * j / steps;
      const Eigen::Vector3d v(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
      const Eigen::Vector3d a = g.transpose() * v;
      const Eigen::Vector3d b = gp.transpose() * v;
      grid = std::max(grid, 0.5 * (a.norm() * b.norm() + std::abs(a.dot(b))));
    }
  }
  const auto r = projection_supremum_mc(form, std::array<int, 2>{1, 1}, 64, SolverConfig{}, RandomSeed{26});
  EXPECT_NEAR(r.estimate.value, grid, 1e-3 * grid);
}

TEST(EmpiricalLp, KnownValues) {
  const std::vector<double> x{1.0, -1.0, 2.0};
  EXPECT_NEAR(empirical_lp_norm(x, 1.0), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(empirical_lp_norm(x, 2.0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(empirical_lp_norm(std::vector<double>{-3.0}, 7.0), 3.0, 1e-14);
  EXPECT_THROW(empirical_lp_norm(std::vector<double>{}, 2.0), DomainError);
  EXPECT_THROW(empirical_lp_norm(x, 0.5), DomainError);
}
