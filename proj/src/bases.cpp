#include "tensorlab/bases.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tensorlab/errors.hpp"

namespace tensorlab {

UnitaryBasis weyl_basis(int n) {
  if (n < 1) throw DomainError("basis dimension must be positive");
  Matrix shift = Matrix::Zero(n, n);
  Matrix clock = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    shift((k + 1) % n, k) = 1.0;
    clock(k, k) = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
  }
  // Exact for the phases that are real or purely imaginary.
  for (int k = 0; k < n; ++k) {
    auto& z = clock(k, k);
    if (std::abs(z.imag()) < 1e-15) z = Complex(std::round(z.real()), 0.0);
    if (std::abs(z.real()) < 1e-15) z = Complex(0.0, std::round(z.imag()));
  }

  UnitaryBasis basis{n, {}};
  basis.elements.reserve(static_cast<std::size_t>(n) * n);
  Matrix shift_power = Matrix::Identity(n, n);
  for (int a = 0; a < n; ++a) {
    Matrix clock_power = Matrix::Identity(n, n);
    for (int b = 0; b < n; ++b) {
      basis.elements.push_back(shift_power * clock_power);
      clock_power = clock_power * clock;
    }
    shift_power = shift_power * shift;
  }
  return basis;
}

BasisReport verify_basis(const UnitaryBasis& basis) {
  BasisReport report;
  const int n = basis.n;
  report.complete = n >= 1 && basis.elements.size() == static_cast<std::size_t>(n) * n &&
                    std::all_of(basis.elements.begin(), basis.elements.end(), [n](const Matrix& u) {
                      return u.rows() == n && u.cols() == n;
                    });
  if (!report.complete) return report;

  const Matrix identity = Matrix::Identity(n, n);
  for (const Matrix& u : basis.elements) {
    const Matrix defect = u.adjoint() * u - identity;
    Eigen::JacobiSVD<Matrix> svd(defect);
    report.unitarity_defect = std::max(report.unitarity_defect, svd.singularValues()(0));
  }
  // Gram matrix of the vectorized elements: gram(a, b) = tr(u_a^* u_b).
  const auto count = static_cast<Eigen::Index>(basis.elements.size());
  Matrix stacked(static_cast<Eigen::Index>(n) * n, count);
  for (Eigen::Index a = 0; a < count; ++a) {
    stacked.col(a) = basis.elements[static_cast<std::size_t>(a)].reshaped();
  }
  const Matrix gram = stacked.adjoint() * stacked - static_cast<double>(n) * Matrix::Identity(count, count);
  report.orthogonality_defect = gram.cwiseAbs().maxCoeff();
  report.pass = report.unitarity_defect < kBasisTolerance &&
                report.orthogonality_defect < kBasisTolerance;
  return report;
}

}  // namespace tensorlab
