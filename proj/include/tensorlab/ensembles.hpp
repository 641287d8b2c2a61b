#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace tensorlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// All numerical objects are stored over the complex numbers; a real-field
// object simply carries zero imaginary parts.
enum class Field { Real, Complex };

enum class EnsembleKind { GaussianReal, GaussianComplex, Rademacher, HaarUnitary };

struct RandomSeed {
  std::uint64_t value = 0;

  friend bool operator==(RandomSeed, RandomSeed) = default;
};

std::string_view to_string(Field field);
std::string_view to_string(EnsembleKind kind);
Field parse_field(std::string_view text);
EnsembleKind parse_ensemble(std::string_view text);

// Splits one master seed into independent streams. For a fixed master the map
// index -> seed is injective over all 2^64 indices.
RandomSeed derive_seed(RandomSeed master, std::uint64_t index);

// The engine every sampler draws from; a pure function of the seed.
using Engine = std::mt19937_64;
Engine make_engine(RandomSeed seed);

// N x N, entries i.i.d. with mean 0 and E|entry|^2 = 1/N. Complex entries have
// independent real and imaginary parts of variance 1/(2N).
Matrix sample_gaussian_matrix(int n, EnsembleKind kind, RandomSeed seed);

// Rademacher: entries +-N^{-1/2}. HaarUnitary: QR of a complex Gaussian matrix
// with the phases of diag(R) absorbed into Q.
Matrix sample_signed_or_unitary_matrix(int n, EnsembleKind kind, RandomSeed seed);

// Dispatches to one of the two samplers above.
Matrix sample_matrix(int n, EnsembleKind kind, RandomSeed seed);

// dim entries i.i.d. with mean 0 and E|entry|^2 = 1.
Vector sample_gaussian_vector(int dim, EnsembleKind kind, RandomSeed seed);

// Orthogonal projection of rank k onto the span of k Gaussian columns.
Matrix sample_projection(int n, int k, RandomSeed seed, Field field = Field::Real);

EnsembleKind gaussian_kind(Field field);

// Draw helpers for code that already owns an engine.
Vector draw_gaussian(Engine& engine, int dim, Field field, double variance = 1.0);
Matrix draw_gaussian(Engine& engine, int rows, int cols, Field field, double variance = 1.0);

}  // namespace tensorlab
