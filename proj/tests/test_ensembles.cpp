#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <vector>

#include <gtest/gtest.h>

#include "tensorlab/ensembles.hpp"
#include "tensorlab/errors.hpp"
#include "tensorlab/stats.hpp"

using namespace tensorlab;

namespace {

RandomSeed seed_at(std::uint64_t i) { return derive_seed(RandomSeed{2024}, i); }

void expect_within_se(const Stats& s, double expected, double k = 3.0) {
  EXPECT_LE(std::abs(s.mean - expected), k * s.standard_error) << "mean " << s.mean << " vs " << expected;
}

}  // namespace

// =============================================================================
// Gaussian matrices
// =============================================================================

TEST(GaussianMatrix, ScalarCaseIsStandardNormal) {
  std::vector<double> x;
  std::vector<double> x2;
  for (int i = 0; i < 4000; ++i) {
    const Matrix m = sample_gaussian_matrix(1, EnsembleKind::GaussianReal, seed_at(i));
    ASSERT_EQ(m.rows(), 1);
    EXPECT_EQ(m(0, 0).imag(), 0.0);
    x.push_back(m(0, 0).real());
    x2.push_back(m(0, 0).real() * m(0, 0).real());
  }
  expect_within_se(summarize(x), 0.0);
  expect_within_se(summarize(x2), 1.0);
}

TEST(GaussianMatrix, HilbertSchmidtMeanIsN) {
  for (int n : {2, 8, 32}) {
    for (auto kind : {EnsembleKind::GaussianReal, EnsembleKind::GaussianComplex}) {
      std::vector<double> hs;
      for (int i = 0; i < 2000; ++i) hs.push_back(sample_gaussian_matrix(n, kind, seed_at(i)).squaredNorm());
      expect_within_se(summarize(hs), n);
    }
  }
}

TEST(GaussianMatrix, ManySeedsHilbertSchmidtMean) {
  std::vector<double> hs;
  for (int i = 0; i < 10000; ++i) hs.push_back(sample_gaussian_matrix(4, EnsembleKind::GaussianReal, seed_at(i)).squaredNorm());
  expect_within_se(summarize(hs), 4.0);
}

TEST(GaussianMatrix, ComplexRealPartVariance) {
  const int n = 50;
  std::vector<double> re2;
  for (int i = 0; i < 40; ++i) {
    const Matrix m = sample_gaussian_matrix(n, EnsembleKind::GaussianComplex, seed_at(i));
    for (Eigen::Index k = 0; k < m.size(); ++k) re2.push_back(m(k).real() * m(k).real());
  }
  expect_within_se(summarize(re2), 1.0 / (2.0 * n));
}

TEST(GaussianMatrix, RejectsNonGaussianKinds) {
  EXPECT_THROW(sample_gaussian_matrix(3, EnsembleKind::Rademacher, RandomSeed{1}), DomainError);
  EXPECT_THROW(sample_gaussian_matrix(3, EnsembleKind::HaarUnitary, RandomSeed{1}), DomainError);
  EXPECT_THROW(sample_gaussian_matrix(0, EnsembleKind::GaussianReal, RandomSeed{1}), DomainError);
}

TEST(GaussianMatrix, PureFunctionOfSeed) {
  const Matrix a = sample_gaussian_matrix(6, EnsembleKind::GaussianComplex, RandomSeed{77});
  const Matrix b = sample_gaussian_matrix(6, EnsembleKind::GaussianComplex, RandomSeed{77});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, sample_gaussian_matrix(6, EnsembleKind::GaussianComplex, RandomSeed{78}));
}

// =============================================================================
// Rademacher and Haar
// =============================================================================

TEST(SignedOrUnitary, RademacherEntriesHaveFixedModulus) {
  for (int n : {1, 3, 16}) {
    const Matrix m = sample_signed_or_unitary_matrix(n, EnsembleKind::Rademacher, seed_at(n));
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      EXPECT_EQ(std::abs(m(k)), 1.0 / std::sqrt(static_cast<double>(n)));
      EXPECT_EQ(m(k).imag(), 0.0);
    }
  }
}

TEST(SignedOrUnitary, HaarIsUnitary) {
  for (int n : {1, 2, 5, 32}) {
    const Matrix u = sample_signed_or_unitary_matrix(n, EnsembleKind::HaarUnitary, seed_at(n));
    const Matrix defect = u.adjoint() * u - Matrix::Identity(n, n);
    EXPECT_LT(defect.cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(SignedOrUnitary, HaarCornerIsUniform) {
  // |U_11|^2 of a 2x2 Haar unitary is uniform on [0, 1].
  const int count = 10000;
  std::vector<double> x;
  for (int i = 0; i < count; ++i) {
    const Matrix u = sample_signed_or_unitary_matrix(2, EnsembleKind::HaarUnitary, seed_at(i));
    x.push_back(std::norm(u(0, 0)));
  }
  std::sort(x.begin(), x.end());
  double ks = 0.0;
  for (int i = 0; i < count; ++i) {
    ks = std::max({ks, std::abs(x[i] - static_cast<double>(i) / count), std::abs(x[i] - static_cast<double>(i + 1) / count)});
  }
  EXPECT_LT(ks, 1.628 / std::sqrt(static_cast<double>(count)));  // 1% critical value
}

TEST(SignedOrUnitary, RejectsGaussianKinds) {
  EXPECT_THROW(sample_signed_or_unitary_matrix(3, EnsembleKind::GaussianReal, RandomSeed{1}), DomainError);
  EXPECT_THROW(sample_signed_or_unitary_matrix(3, EnsembleKind::GaussianComplex, RandomSeed{1}), DomainError);
}

TEST(SignedOrUnitary, DispatcherCoversEveryKind) {
  for (auto kind : {EnsembleKind::GaussianReal, EnsembleKind::GaussianComplex, EnsembleKind::Rademacher,
                    EnsembleKind::HaarUnitary}) {
    EXPECT_EQ(sample_matrix(4, kind, RandomSeed{3}).rows(), 4);
    EXPECT_EQ(parse_ensemble(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_ensemble("gaussian"), DomainError);
}

// =============================================================================
// Vectors
// =============================================================================

TEST(GaussianVector, SquaredNormMeanIsDim) {
  for (auto kind : {EnsembleKind::GaussianReal, EnsembleKind::GaussianComplex}) {
    std::vector<double> sq;
    for (int i = 0; i < 10000; ++i) sq.push_back(sample_gaussian_vector(5, kind, seed_at(i)).squaredNorm());
    expect_within_se(summarize(sq), 5.0);
  }
}

TEST(GaussianVector, EdgeCases) {
  EXPECT_THROW(sample_gaussian_vector(0, EnsembleKind::GaussianReal, RandomSeed{1}), DomainError);
  EXPECT_THROW(sample_gaussian_vector(3, EnsembleKind::Rademacher, RandomSeed{1}), DomainError);
  EXPECT_EQ(sample_gaussian_vector(1, EnsembleKind::GaussianReal, RandomSeed{1}).size(), 1);
  EXPECT_NE(sample_gaussian_vector(4, EnsembleKind::GaussianReal, RandomSeed{1}),
            sample_gaussian_vector(4, EnsembleKind::GaussianReal, RandomSeed{2}));
}

// =============================================================================
// Projections
// =============================================================================

TEST(Projection, FullRankIsIdentity) {
  for (auto field : {Field::Real, Field::Complex}) {
    EXPECT_EQ(sample_projection(5, 5, RandomSeed{9}, field), Matrix::Identity(5, 5));
  }
}

TEST(Projection, DefiningProperties) {
  for (int n : {2, 5, 9}) {
    for (int k = 1; k <= n; ++k) {
      for (auto field : {Field::Real, Field::Complex}) {
        const Matrix p = sample_projection(n, k, seed_at(100 * n + k), field);
        EXPECT_LT((p * p - p).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LT((p.adjoint() - p).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_NEAR(p.trace().real(), k, 1e-8);
      }
    }
  }
}

TEST(Projection, RejectsRankOutOfRange) {
  EXPECT_THROW(sample_projection(4, 0, RandomSeed{1}), DomainError);
  EXPECT_THROW(sample_projection(4, 5, RandomSeed{1}), DomainError);
}

TEST(Projection, MatchesHaarFrameOracle) {
  // tr(PQ) for a fixed rank-2 Q, against projections built from the first two
  // columns of an orthogonal matrix from modified Gram-Schmidt.
  const int n = 4;
  const int k = 2;
  Matrix q = Matrix::Zero(n, n);
  q(0, 0) = 1.0;
  q(1, 1) = 1.0;
  std::vector<double> a;
  std::vector<double> a2;
  std::vector<double> b;
  std::vector<double> b2;
  for (int i = 0; i < 4000; ++i) {
    const double x = sample_projection(n, k, seed_at(i)).cwiseProduct(q.transpose()).sum().real();
    a.push_back(x);
    a2.push_back(x * x);

    Engine engine = make_engine(derive_seed(RandomSeed{555}, i));
    std::normal_distribution<double> normal;
    Eigen::MatrixXd frame(n, k);
    for (int c = 0; c < k; ++c) {
      Eigen::VectorXd v(n);
      for (int r = 0; r < n; ++r) v(r) = normal(engine);
      for (int j = 0; j < c; ++j) v -= frame.col(j).dot(v) * frame.col(j);
      frame.col(c) = v.normalized();
    }
    const Eigen::MatrixXd p = frame * frame.transpose();
    const double y = p.topLeftCorner(2, 2).trace();
    b.push_back(y);
    b2.push_back(y * y);
  }
  for (const auto& [u, v] : {std::pair{summarize(a), summarize(b)}, std::pair{summarize(a2), summarize(b2)}}) {
    EXPECT_LE(std::abs(u.mean - v.mean), 3.0 * std::hypot(u.standard_error, v.standard_error));
  }
  expect_within_se(summarize(a), static_cast<double>(k * k) / n);
}

// =============================================================================
// Seeds
// =============================================================================

TEST(DeriveSeed, DistinctAndStable) {
  const RandomSeed m{123};
  EXPECT_NE(derive_seed(m, 0), derive_seed(m, 1));
  EXPECT_EQ(derive_seed(m, 7), derive_seed(m, 7));
  EXPECT_NE(derive_seed(RandomSeed{1}, 0), derive_seed(RandomSeed{2}, 0));
}

TEST(DeriveSeed, MillionIndicesWithoutCollision) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1'000'000);
  for (std::uint64_t i = 0; i < 1'000'000; ++i) seen.insert(derive_seed(RandomSeed{99}, i).value);
  EXPECT_EQ(seen.size(), 1'000'000u);
}

TEST(Field, ParsesNames) {
  EXPECT_EQ(parse_field("real"), Field::Real);
  EXPECT_EQ(parse_field("complex"), Field::Complex);
  EXPECT_THROW(parse_field("quaternion"), DomainError);
}
