#pragma once

#include <vector>

#include "tensorlab/ensembles.hpp"

namespace tensorlab {

/// N^2 unitaries of size N x N, pairwise orthogonal for tr(a^* b).
struct UnitaryBasis {
  int n = 0;
  std::vector<Matrix> elements;
};

/// Clock-and-shift family u_(a,b) = X^a Z^b with Z = diag(w^k), w = exp(2 pi i / N)
/// and X e_k = e_{k+1 mod N}. Element (a, b) is stored at position a * N + b.
UnitaryBasis weyl_basis(int n);

struct BasisReport {
  double unitarity_defect = 0.0;      // max_u ||u^* u - I||_op
  double orthogonality_defect = 0.0;  // max_{a,b} |tr(u_a^* u_b) - N delta_ab|
  bool complete = false;              // exactly N^2 elements of size N x N
  bool pass = false;
};

inline constexpr double kBasisTolerance = 1e-8;

BasisReport verify_basis(const UnitaryBasis& basis);

}  // namespace tensorlab
