#include "tensorlab/dense_tensor.hpp"

#include <cmath>
#include <string>

#include "tensorlab/errors.hpp"

namespace tensorlab {

namespace {

using RowMajorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t product(const std::vector<int>& dims) {
  std::size_t p = 1;
  for (int n : dims) p *= static_cast<std::size_t>(n);
  return p;
}

// Contracts the last mode of a row-major block of shape (rows, last).
Vector contract_last(const Vector& data, int last, const Vector& x) {
  const Eigen::Index rows = data.size() / last;
  Eigen::Map<const RowMajorMatrix> view(data.data(), rows, last);
  return view * x;
}

// Contracts the first mode of a row-major block of shape (first, cols).
Vector contract_first(const Vector& data, int first, const Vector& x) {
  const Eigen::Index cols = data.size() / first;
  Eigen::Map<const RowMajorMatrix> view(data.data(), first, cols);
  return view.transpose() * x;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<int> dims, Vector entries, Field field)
    : dims_(std::move(dims)), entries_(std::move(entries)), field_(field) {
  if (dims_.empty()) throw DomainError("tensor order must be positive");
  for (int n : dims_) {
    if (n < 1) throw DomainError("tensor dimensions must be positive");
  }
  if (product(dims_) != static_cast<std::size_t>(entries_.size())) {
    throw DomainError("entry count " + std::to_string(entries_.size()) +
                      " does not match the product of dims");
  }
  if (!entries_.allFinite()) throw DomainError("tensor entries must be finite");
}

DenseTensor DenseTensor::zeros(std::vector<int> dims, Field field) {
  const auto count = static_cast<Eigen::Index>(product(dims));
  return DenseTensor(std::move(dims), Vector::Zero(count), field);
}

std::size_t DenseTensor::linear_index(std::span<const int> index) const {
  if (index.size() != dims_.size()) throw DomainError("multi-index has the wrong order");
  std::size_t linear = 0;
  for (std::size_t m = 0; m < dims_.size(); ++m) {
    if (index[m] < 0 || index[m] >= dims_[m]) throw DomainError("multi-index out of range");
    linear = linear * static_cast<std::size_t>(dims_[m]) + static_cast<std::size_t>(index[m]);
  }
  return linear;
}

void DenseTensor::unravel(std::size_t linear, std::span<int> index) const {
  for (std::size_t m = dims_.size(); m-- > 0;) {
    index[m] = static_cast<int>(linear % static_cast<std::size_t>(dims_[m]));
    linear /= static_cast<std::size_t>(dims_[m]);
  }
}

Complex DenseTensor::at(std::span<const int> index) const {
  return entries_[static_cast<Eigen::Index>(linear_index(index))];
}

double DenseTensor::max_abs() const {
  return entries_.size() == 0 ? 0.0 : entries_.cwiseAbs().maxCoeff();
}

DenseTensor DenseTensor::scaled(Complex c) const {
  const Field field = (field_ == Field::Real && c.imag() == 0.0) ? Field::Real : Field::Complex;
  return DenseTensor(dims_, entries_ * c, field);
}

DenseTensor DenseTensor::mode_product(int mode, const Matrix& op) const {
  if (mode < 0 || mode >= order()) throw DomainError("mode index out of range");
  if (op.cols() != dims_[mode]) throw DomainError("mode_product: operator width mismatch");
  std::size_t left = 1;
  for (int m = 0; m < mode; ++m) left *= static_cast<std::size_t>(dims_[m]);
  std::size_t right = 1;
  for (int m = mode + 1; m < order(); ++m) right *= static_cast<std::size_t>(dims_[m]);

  std::vector<int> out_dims = dims_;
  out_dims[mode] = static_cast<int>(op.rows());
  Vector out(static_cast<Eigen::Index>(left * op.rows() * right));
  const auto in_block = static_cast<Eigen::Index>(dims_[mode] * right);
  const auto out_block = static_cast<Eigen::Index>(op.rows() * right);
  for (std::size_t l = 0; l < left; ++l) {
    Eigen::Map<const RowMajorMatrix> in(entries_.data() + l * in_block, dims_[mode],
                                        static_cast<Eigen::Index>(right));
    Eigen::Map<RowMajorMatrix> dst(out.data() + l * out_block, op.rows(),
                                   static_cast<Eigen::Index>(right));
    dst.noalias() = op * in;
  }
  const bool real = field_ == Field::Real && op.imag().cwiseAbs().maxCoeff() == 0.0;
  return DenseTensor(std::move(out_dims), std::move(out), real ? Field::Real : Field::Complex);
}

Vector DenseTensor::contract_except(int mode, std::span<const Vector> vectors) const {
  if (mode < 0 || mode >= order()) throw DomainError("mode index out of range");
  if (vectors.size() != dims_.size()) throw DomainError("one vector per mode required");
  for (int m = 0; m < order(); ++m) {
    if (m != mode && vectors[m].size() != dims_[m]) {
      throw DomainError("vector length does not match mode dimension");
    }
  }
  Vector current = entries_;
  for (int m = order() - 1; m > mode; --m) current = contract_last(current, dims_[m], vectors[m]);
  for (int m = 0; m < mode; ++m) current = contract_first(current, dims_[m], vectors[m]);
  return current;
}

Complex DenseTensor::contract(std::span<const Vector> vectors) const {
  const Vector coeffs = contract_except(0, vectors);
  if (vectors[0].size() != dims_[0]) throw DomainError("vector length does not match mode dimension");
  return (coeffs.array() * vectors[0].array()).sum();
}

}  // namespace tensorlab
