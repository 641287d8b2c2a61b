#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tensorlab/ensembles.hpp"

namespace tensorlab {

// Default cap on the number of entries any dense conversion may allocate.
inline constexpr std::size_t kDefaultMaterializationCap = 100'000'000;

/// Explicit order-d coefficient array. Entries are stored in row-major order
/// over the multi-index (i_1, ..., i_d): the last index varies fastest.
class DenseTensor {
 public:
  DenseTensor(std::vector<int> dims, Vector entries, Field field);

  static DenseTensor zeros(std::vector<int> dims, Field field);

  int order() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  Field field() const { return field_; }
  std::size_t size() const { return static_cast<std::size_t>(entries_.size()); }

  const Vector& entries() const { return entries_; }
  Complex operator[](std::size_t linear) const { return entries_[static_cast<Eigen::Index>(linear)]; }
  Complex at(std::span<const int> index) const;

  std::size_t linear_index(std::span<const int> index) const;
  void unravel(std::size_t linear, std::span<int> index) const;

  double frobenius_norm() const { return entries_.norm(); }
  double max_abs() const;

  DenseTensor scaled(Complex c) const;

  /// Applies `op` along `mode`: out[.., a, ..] = sum_b op(a, b) in[.., b, ..].
  DenseTensor mode_product(int mode, const Matrix& op) const;

  /// Multilinear contraction sum_i t(i) prod_m x_m(i_m) (bilinear, no conjugation).
  Complex contract(std::span<const Vector> vectors) const;

  /// Coefficient vector of `mode` with every other mode contracted against
  /// `vectors`; vectors[mode] is ignored.
  Vector contract_except(int mode, std::span<const Vector> vectors) const;

 private:
  std::vector<int> dims_;
  Vector entries_;
  Field field_;
};

}  // namespace tensorlab
