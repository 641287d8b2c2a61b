#pragma once

#include <cstddef>
#include <vector>

#include "tensorlab/dense_tensor.hpp"
#include "tensorlab/ensembles.hpp"

namespace tensorlab {

/// A = sum_{ij} alpha(i, j) Y'_i (x) Y''_j on C^N (x) C^N, applied without
/// forming the N^2 x N^2 matrix.
///
/// Vectors of C^N (x) C^N are N x N matrices V with e_a (x) e_b <-> V(a, b), the
/// row-major reshape. Then (A (x) B) vec(V) = vec(A V B^T) and the adjoint acts
/// as (A (x) B)^* vec(W) = vec(A^* W conj(B)): transposes, not adjoints, on the
/// right factor.
class KroneckerSumOperator {
 public:
  KroneckerSumOperator(Matrix alpha, std::vector<Matrix> left, std::vector<Matrix> right);

  int n() const { return static_cast<int>(alpha_.rows()); }
  int local_dim() const { return static_cast<int>(left_.front().rows()); }
  const Matrix& alpha() const { return alpha_; }
  const std::vector<Matrix>& left() const { return left_; }
  const std::vector<Matrix>& right() const { return right_; }

  Matrix apply(const Matrix& v) const;
  Matrix apply_adjoint(const Matrix& w) const;

  /// Dense N^2 x N^2 matrix; row index a * N + b matches the reshape above.
  Matrix dense(std::size_t cap = kDefaultMaterializationCap) const;

  /// c(i, j) = <(Y'_i (x) Y''_j) x, y>, the derivative of <A x, y> in alpha(i, j).
  Matrix alpha_gradient(const Matrix& x, const Matrix& y) const;

 private:
  Matrix alpha_;
  std::vector<Matrix> left_;
  std::vector<Matrix> right_;
};

struct LanczosOptions {
  int max_steps = 60;
  double relative_tolerance = 1e-6;
  // Run the matrix products in complex<float>; Ritz values stay in double.
  bool single_precision = false;

  friend bool operator==(const LanczosOptions&, const LanczosOptions&) = default;
};

struct TopSingular {
  double value = 0.0;
  Matrix left;   // unit u with A v ~ value * u
  Matrix right;  // unit v
  int steps = 0;
  bool converged = false;
};

/// Golub-Kahan-Lanczos bidiagonalization with full reorthogonalization. The
/// returned value is a Ritz value, hence a lower bound on ||A||.
TopSingular top_singular_value(const KroneckerSumOperator& op, const LanczosOptions& options,
                               RandomSeed seed);

}  // namespace tensorlab
