#include "tensorlab/ensembles.hpp"

#include <cmath>
#include <string>

#include "tensorlab/errors.hpp"

namespace tensorlab {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void require_positive(int n, const char* what) {
  if (n < 1) throw DomainError(std::string(what) + " must be positive, got " + std::to_string(n));
}

}  // namespace

std::string_view to_string(Field field) {
  return field == Field::Real ? "real" : "complex";
}

std::string_view to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::GaussianReal: return "gaussian_real";
    case EnsembleKind::GaussianComplex: return "gaussian_complex";
    case EnsembleKind::Rademacher: return "rademacher";
    case EnsembleKind::HaarUnitary: return "haar_unitary";
  }
  return "?";
}

Field parse_field(std::string_view text) {
  if (text == "real") return Field::Real;
  if (text == "complex") return Field::Complex;
  throw DomainError("unknown field '" + std::string(text) + "'");
}

EnsembleKind parse_ensemble(std::string_view text) {
  for (auto kind : {EnsembleKind::GaussianReal, EnsembleKind::GaussianComplex,
                    EnsembleKind::Rademacher, EnsembleKind::HaarUnitary}) {
    if (to_string(kind) == text) return kind;
  }
  throw DomainError("unknown ensemble '" + std::string(text) + "'");
}

RandomSeed derive_seed(RandomSeed master, std::uint64_t index) {
  // mix64(master) is fixed, the odd-multiplier offset is injective in index
  // modulo 2^64, and the outer mix64 is a bijection.
  return RandomSeed{mix64(mix64(master.value) + (index + 1) * kGolden)};
}

Engine make_engine(RandomSeed seed) {
  return Engine(seed.value);
}

EnsembleKind gaussian_kind(Field field) {
  return field == Field::Real ? EnsembleKind::GaussianReal : EnsembleKind::GaussianComplex;
}

Vector draw_gaussian(Engine& engine, int dim, Field field, double variance) {
  Vector out(dim);
  if (field == Field::Real) {
    std::normal_distribution<double> normal(0.0, std::sqrt(variance));
    for (int i = 0; i < dim; ++i) out[i] = Complex(normal(engine), 0.0);
  } else {
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    for (int i = 0; i < dim; ++i) {
      const double re = normal(engine);
      const double im = normal(engine);
      out[i] = Complex(re, im);
    }
  }
  return out;
}

Matrix draw_gaussian(Engine& engine, int rows, int cols, Field field, double variance) {
  Vector flat = draw_gaussian(engine, rows * cols, field, variance);
  Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out(i, j) = flat[i * cols + j];
  }
  return out;
}

Matrix sample_gaussian_matrix(int n, EnsembleKind kind, RandomSeed seed) {
  require_positive(n, "N");
  if (kind != EnsembleKind::GaussianReal && kind != EnsembleKind::GaussianComplex) {
    throw DomainError("sample_gaussian_matrix requires a Gaussian ensemble, got " +
                      std::string(to_string(kind)));
  }
  Engine engine = make_engine(seed);
  const Field field = kind == EnsembleKind::GaussianReal ? Field::Real : Field::Complex;
  return draw_gaussian(engine, n, n, field, 1.0 / n);
}

Matrix sample_signed_or_unitary_matrix(int n, EnsembleKind kind, RandomSeed seed) {
  require_positive(n, "N");
  Engine engine = make_engine(seed);
  if (kind == EnsembleKind::Rademacher) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::bernoulli_distribution coin(0.5);
    Matrix out(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) out(i, j) = coin(engine) ? scale : -scale;
    }
    return out;
  }
  if (kind == EnsembleKind::HaarUnitary) {
    Matrix gauss = draw_gaussian(engine, n, n, Field::Complex);
    Eigen::HouseholderQR<Matrix> qr(gauss);
    Matrix q = qr.householderQ();
    const Matrix& r = qr.matrixQR();
    for (int j = 0; j < n; ++j) {
      const Complex diag = r(j, j);
      const double mod = std::abs(diag);
      // Phase of R_jj moved into column j of Q so that R has a positive diagonal.
      if (mod > 0.0) q.col(j) *= diag / mod;
    }
    return q;
  }
  throw DomainError("sample_signed_or_unitary_matrix requires Rademacher or HaarUnitary, got " +
                    std::string(to_string(kind)));
}

Matrix sample_matrix(int n, EnsembleKind kind, RandomSeed seed) {
  if (kind == EnsembleKind::GaussianReal || kind == EnsembleKind::GaussianComplex) {
    return sample_gaussian_matrix(n, kind, seed);
  }
  return sample_signed_or_unitary_matrix(n, kind, seed);
}

Vector sample_gaussian_vector(int dim, EnsembleKind kind, RandomSeed seed) {
  if (dim < 1) throw DomainError("vector dimension must be positive");
  if (kind != EnsembleKind::GaussianReal && kind != EnsembleKind::GaussianComplex) {
    throw DomainError("sample_gaussian_vector requires a Gaussian ensemble");
  }
  Engine engine = make_engine(seed);
  return draw_gaussian(engine, dim,
                       kind == EnsembleKind::GaussianReal ? Field::Real : Field::Complex);
}

Matrix sample_projection(int n, int k, RandomSeed seed, Field field) {
  require_positive(n, "N");
  if (k < 1 || k > n) {
    throw DomainError("projection rank " + std::to_string(k) + " outside 1.." + std::to_string(n));
  }
  if (k == n) return Matrix::Identity(n, n);
  Engine engine = make_engine(seed);
  Matrix cols = draw_gaussian(engine, n, k, field);
  Eigen::HouseholderQR<Matrix> qr(cols);
  Matrix frame = qr.householderQ() * Matrix::Identity(n, k);
  Matrix p = frame * frame.adjoint();
  // Exact Hermitian symmetry; rounding otherwise leaves ~1e-17 asymmetry.
  return (p + p.adjoint()) / 2.0;
}

}  // namespace tensorlab
