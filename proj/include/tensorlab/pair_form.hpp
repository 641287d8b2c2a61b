#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tensorlab/bases.hpp"
#include "tensorlab/dense_tensor.hpp"
#include "tensorlab/ensembles.hpp"

namespace tensorlab {

/// Implicit order-d tensor on (l_2^{N^2})^{(x)d} carried by two vectors g, g'
/// of dimension N^d. Its coefficient at ((i_1,i'_1), ..., (i_d,i'_d)) is
/// g(i_1..i_d) * g'(i'_1..i'_d); both vectors are row-major over (N, ..., N).
///
/// Pairing with matrices R_1..R_d is the bilinear form
///   Z(R_1..R_d) = sum g(i) g'(i') prod_m R_m(i_m, i'_m) = g^T (R_1 (x) ... (x) R_d) g',
/// which in the real field equals <(R_1 (x) ... (x) R_d)^T g, g'>. No conjugation
/// enters Z; conjugation appears only where a Hilbert-Schmidt inner product is
/// taken (EPR coefficients, gradient ascent updates).
class GaussianPairForm {
 public:
  GaussianPairForm(int n, int order, Vector g, Vector g_prime, Field field);

  static GaussianPairForm sample(int n, int order, Field field, RandomSeed seed);

  int n() const { return n_; }
  int order() const { return order_; }
  Field field() const { return field_; }
  const Vector& g() const { return g_; }
  const Vector& g_prime() const { return g_prime_; }
  std::size_t local_size() const { return static_cast<std::size_t>(g_.size()); }

  GaussianPairForm scaled(Complex c) const;

 private:
  int n_;
  int order_;
  Vector g_;
  Vector g_prime_;
  Field field_;
};

/// d square matrices of one size, with their Hilbert-Schmidt and operator norms.
class ModeMatrices {
 public:
  explicit ModeMatrices(std::vector<Matrix> mats);

  int order() const { return static_cast<int>(mats_.size()); }
  int n() const { return static_cast<int>(mats_.front().rows()); }
  const Matrix& operator[](int m) const { return mats_[static_cast<std::size_t>(m)]; }
  std::span<const Matrix> span() const { return mats_; }
  double hs_norm(int m) const { return hs_[static_cast<std::size_t>(m)]; }
  double op_norm(int m) const { return op_[static_cast<std::size_t>(m)]; }

 private:
  std::vector<Matrix> mats_;
  std::vector<double> hs_;
  std::vector<double> op_;
};

/// Z(R_1..R_d) by d mode contractions, O(d N^{d+1}).
Complex evaluate_form(const GaussianPairForm& form, const ModeMatrices& mats);
Complex evaluate_form(const GaussianPairForm& form, std::span<const Matrix> mats);

/// Same value with the modes of g' contracted in the order given by `schedule`.
Complex evaluate_form_ordered(const GaussianPairForm& form, std::span<const Matrix> mats,
                              std::span<const int> schedule);

/// G with Z(.., X at mode m, ..) = pair(X, G) for every X, where
/// pair(X, G) = sum_{ij} X(i, j) G(i, j) (bilinear). The unit-HS maximizer of
/// |Z| over mode m is conj(G) / ||G||_F with value ||G||_F.
Matrix mode_gradient(const GaussianPairForm& form, std::span<const Matrix> mats, int mode);
Matrix mode_gradient(const GaussianPairForm& form, const ModeMatrices& mats, int mode);

Complex pair(const Matrix& x, const Matrix& g);

/// Dense tensor with dims (N^2, ..., N^2); mode index i_m = a_m * N + b_m
/// holds the pair (row a_m of g, column b_m of g').
DenseTensor to_dense(const GaussianPairForm& form,
                     std::size_t cap = kDefaultMaterializationCap);

/// N^d x N^d rank-one matrix M(a, b) = g(a) g'(b): row multi-index
/// (i_1..i_d) and column multi-index (i'_1..i'_d), both row-major. The dense
/// entry ((i_1,i'_1), .., (i_d,i'_d)) sits at M((i_1..i_d), (i'_1..i'_d)).
Matrix reshape_bipartite(const GaussianPairForm& form,
                         std::size_t cap = kDefaultMaterializationCap);

/// hat T(i) = N^{-d} <T, u_{i_1} (x) ... (x) u_{i_d}>_HS
///          = N^{-d} Z(conj(u_{i_1}), ..., conj(u_{i_d})).
DenseTensor epr_coefficients(const GaussianPairForm& form, std::span<const UnitaryBasis> bases,
                             std::size_t cap = kDefaultMaterializationCap);

/// sum_i hat T(i) u_{i_1} (x) ... (x) u_{i_d}, laid out like to_dense.
DenseTensor epr_reconstruct(const DenseTensor& coefficients, std::span<const UnitaryBasis> bases);

}  // namespace tensorlab
