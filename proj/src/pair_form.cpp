#include "tensorlab/pair_form.hpp"

#include <cmath>
#include <string>

#include "tensorlab/errors.hpp"

namespace tensorlab {

namespace {

using RowMajorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t ipow(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

void check_mats(const GaussianPairForm& form, std::span<const Matrix> mats) {
  if (static_cast<int>(mats.size()) != form.order()) {
    throw DomainError("expected " + std::to_string(form.order()) + " mode matrices, got " +
                      std::to_string(mats.size()));
  }
  for (const Matrix& r : mats) {
    if (r.rows() != form.n() || r.cols() != form.n()) {
      throw DomainError("mode matrices must be " + std::to_string(form.n()) + "x" +
                        std::to_string(form.n()));
    }
  }
}

// x <- (I (x) .. (x) R at `mode` (x) .. (x) I) x for x row-major over (N, .., N).
void apply_mode(Vector& x, int n, int order, int mode, const Matrix& r) {
  const std::size_t left = ipow(static_cast<std::size_t>(n), mode);
  const auto right = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(n), order - mode - 1));
  const Eigen::Index block = n * right;
  RowMajorMatrix scratch(n, right);
  for (std::size_t l = 0; l < left; ++l) {
    Eigen::Map<RowMajorMatrix> view(x.data() + static_cast<Eigen::Index>(l) * block, n, right);
    scratch.noalias() = r * view;
    view = scratch;
  }
}

void check_cap(std::size_t entries, std::size_t cap, const char* what) {
  if (entries > cap) {
    throw ResourceError(std::string(what) + " needs " + std::to_string(entries) +
                        " entries, above the materialization cap of " + std::to_string(cap));
  }
}

void check_bases(const GaussianPairForm& form, std::span<const UnitaryBasis> bases) {
  if (static_cast<int>(bases.size()) != form.order()) {
    throw DomainError("one unitary basis per mode required");
  }
  for (const UnitaryBasis& basis : bases) {
    if (basis.n != form.n() ||
        basis.elements.size() != static_cast<std::size_t>(form.n()) * form.n()) {
      throw DomainError("basis local dimension does not match the form");
    }
  }
}

// Row i holds the row-major vectorization of conj(u_i) (analysis) or column i
// holds that of u_i (synthesis).
Matrix basis_matrix(const UnitaryBasis& basis, bool analysis) {
  const int n = basis.n;
  const int n2 = n * n;
  Matrix w(n2, n2);
  for (int i = 0; i < n2; ++i) {
    const Matrix& u = basis.elements[static_cast<std::size_t>(i)];
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (analysis) {
          w(i, a * n + b) = std::conj(u(a, b));
        } else {
          w(a * n + b, i) = u(a, b);
        }
      }
    }
  }
  return w;
}

}  // namespace

GaussianPairForm::GaussianPairForm(int n, int order, Vector g, Vector g_prime, Field field)
    : n_(n), order_(order), g_(std::move(g)), g_prime_(std::move(g_prime)), field_(field) {
  if (n_ < 1) throw DomainError("local dimension N must be positive");
  if (order_ < 1) throw DomainError("order must be positive");
  const std::size_t dim = ipow(static_cast<std::size_t>(n_), order_);
  if (static_cast<std::size_t>(g_.size()) != dim || static_cast<std::size_t>(g_prime_.size()) != dim) {
    throw DomainError("g and g' must have dimension N^d = " + std::to_string(dim));
  }
  const double ng = g_.norm();
  const double ngp = g_prime_.norm();
  if (!std::isfinite(ng) || !std::isfinite(ngp) || ng <= 0.0 || ngp <= 0.0) {
    throw DomainError("g and g' must have finite positive norms");
  }
}

GaussianPairForm GaussianPairForm::sample(int n, int order, Field field, RandomSeed seed) {
  if (n < 1 || order < 1) throw DomainError("N and d must be positive");
  const auto dim = static_cast<int>(ipow(static_cast<std::size_t>(n), order));
  Engine engine = make_engine(seed);
  Vector g = draw_gaussian(engine, dim, field);
  Vector gp = draw_gaussian(engine, dim, field);
  return GaussianPairForm(n, order, std::move(g), std::move(gp), field);
}

GaussianPairForm GaussianPairForm::scaled(Complex c) const {
  const Field field = (field_ == Field::Real && c.imag() == 0.0) ? Field::Real : Field::Complex;
  return GaussianPairForm(n_, order_, g_ * c, g_prime_, field);
}

ModeMatrices::ModeMatrices(std::vector<Matrix> mats) : mats_(std::move(mats)) {
  if (mats_.empty()) throw DomainError("at least one mode matrix required");
  const Eigen::Index n = mats_.front().rows();
  for (const Matrix& r : mats_) {
    if (r.rows() != n || r.cols() != n) throw DomainError("mode matrices must share one square size");
    hs_.push_back(r.norm());
    Eigen::JacobiSVD<Matrix> svd(r);
    op_.push_back(svd.singularValues().size() ? svd.singularValues()(0) : 0.0);
  }
}

Complex evaluate_form(const GaussianPairForm& form, std::span<const Matrix> mats) {
  check_mats(form, mats);
  Vector v = form.g_prime();
  for (int m = 0; m < form.order(); ++m) apply_mode(v, form.n(), form.order(), m, mats[m]);
  return (form.g().array() * v.array()).sum();
}

Complex evaluate_form(const GaussianPairForm& form, const ModeMatrices& mats) {
  return evaluate_form(form, mats.span());
}

Complex evaluate_form_ordered(const GaussianPairForm& form, std::span<const Matrix> mats,
                              std::span<const int> schedule) {
  check_mats(form, mats);
  if (static_cast<int>(schedule.size()) != form.order()) throw DomainError("schedule has wrong length");
  std::vector<bool> seen(static_cast<std::size_t>(form.order()), false);
  Vector v = form.g_prime();
  for (int m : schedule) {
    if (m < 0 || m >= form.order() || seen[static_cast<std::size_t>(m)]) {
      throw DomainError("schedule must be a permutation of the modes");
    }
    seen[static_cast<std::size_t>(m)] = true;
    apply_mode(v, form.n(), form.order(), m, mats[m]);
  }
  return (form.g().array() * v.array()).sum();
}

Matrix mode_gradient(const GaussianPairForm& form, std::span<const Matrix> mats, int mode) {
  check_mats(form, mats);
  if (mode < 0 || mode >= form.order()) throw DomainError("mode index out of range");
  const int n = form.n();
  const int d = form.order();
  Vector w = form.g_prime();
  for (int m = 0; m < d; ++m) {
    if (m != mode) apply_mode(w, n, d, m, mats[m]);
  }
  // G(i, j) = sum over the remaining indices of g(.., i, ..) w(.., j, ..).
  const std::size_t left = ipow(static_cast<std::size_t>(n), mode);
  const auto right = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(n), d - mode - 1));
  const Eigen::Index block = n * right;
  Matrix grad = Matrix::Zero(n, n);
  for (std::size_t l = 0; l < left; ++l) {
    const auto offset = static_cast<Eigen::Index>(l) * block;
    Eigen::Map<const RowMajorMatrix> gb(form.g().data() + offset, n, right);
    Eigen::Map<const RowMajorMatrix> wb(w.data() + offset, n, right);
    grad.noalias() += gb * wb.transpose();
  }
  return grad;
}

Matrix mode_gradient(const GaussianPairForm& form, const ModeMatrices& mats, int mode) {
  return mode_gradient(form, mats.span(), mode);
}

Complex pair(const Matrix& x, const Matrix& g) {
  if (x.rows() != g.rows() || x.cols() != g.cols()) throw DomainError("pair: shape mismatch");
  return (x.array() * g.array()).sum();
}

DenseTensor to_dense(const GaussianPairForm& form, std::size_t cap) {
  const auto n = static_cast<std::size_t>(form.n());
  const int d = form.order();
  const std::size_t local = form.local_size();
  check_cap(local * local, cap, "to_dense");

  // Linear dense index = spread(a) * N + spread(b), where spread places the
  // base-N digits of a multi-index at base-N^2 positions.
  std::vector<std::size_t> spread(local);
  for (std::size_t a = 0; a < local; ++a) {
    std::size_t rest = a;
    std::size_t value = 0;
    std::size_t weight = 1;
    for (int m = 0; m < d; ++m) {
      value += (rest % n) * weight;
      rest /= n;
      weight *= n * n;
    }
    spread[a] = value;
  }
  Vector entries(static_cast<Eigen::Index>(local * local));
  for (std::size_t a = 0; a < local; ++a) {
    const Complex ga = form.g()[static_cast<Eigen::Index>(a)];
    for (std::size_t b = 0; b < local; ++b) {
      entries[static_cast<Eigen::Index>(spread[a] * n + spread[b])] =
          ga * form.g_prime()[static_cast<Eigen::Index>(b)];
    }
  }
  return DenseTensor(std::vector<int>(static_cast<std::size_t>(d), form.n() * form.n()),
                     std::move(entries), form.field());
}

Matrix reshape_bipartite(const GaussianPairForm& form, std::size_t cap) {
  const std::size_t local = form.local_size();
  check_cap(local * local, cap, "reshape_bipartite");
  return form.g() * form.g_prime().transpose();
}

DenseTensor epr_coefficients(const GaussianPairForm& form, std::span<const UnitaryBasis> bases,
                             std::size_t cap) {
  check_bases(form, bases);
  DenseTensor out = to_dense(form, cap);
  for (int m = 0; m < form.order(); ++m) {
    out = out.mode_product(m, basis_matrix(bases[static_cast<std::size_t>(m)], true));
  }
  return out.scaled(std::pow(static_cast<double>(form.n()), -form.order()));
}

DenseTensor epr_reconstruct(const DenseTensor& coefficients, std::span<const UnitaryBasis> bases) {
  if (bases.size() != static_cast<std::size_t>(coefficients.order())) {
    throw DomainError("one unitary basis per mode required");
  }
  DenseTensor out = coefficients;
  for (int m = 0; m < coefficients.order(); ++m) {
    const UnitaryBasis& basis = bases[static_cast<std::size_t>(m)];
    if (static_cast<int>(basis.elements.size()) != coefficients.dims()[static_cast<std::size_t>(m)]) {
      throw DomainError("basis size does not match coefficient mode");
    }
    out = out.mode_product(m, basis_matrix(basis, false));
  }
  return out;
}

}  // namespace tensorlab
