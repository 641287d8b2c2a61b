#include "tensorlab/kron_operator.hpp"

#include <cmath>
#include <string>

#include "tensorlab/errors.hpp"

namespace tensorlab {

namespace {

// Stacked factors so that each application is two large products:
//   A V   = [sum_i alpha_i1 Y'_i V | ... ] * [Y''_1^T; ...; Y''_n^T]
//   A^* W = [sum_i conj(alpha_i1) Y'^*_i W | ... ] * [conj(Y''_1); ...; conj(Y''_n)]
template <typename Scalar>
class KronKernel {
 public:
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  KronKernel(const Matrix& alpha, const std::vector<Matrix>& left, const std::vector<Matrix>& right)
      : n_(static_cast<int>(alpha.rows())),
        dim_(static_cast<int>(left.front().rows())),
        alpha_(alpha.template cast<Scalar>()),
        left_(n_ * dim_, dim_),
        left_adj_(n_ * dim_, dim_),
        right_t_(n_ * dim_, dim_),
        right_c_(n_ * dim_, dim_),
        products_(n_ * dim_, dim_),
        mixed_(dim_, n_ * dim_) {
    for (int i = 0; i < n_; ++i) {
      const auto& l = left[static_cast<std::size_t>(i)];
      const auto& r = right[static_cast<std::size_t>(i)];
      left_.middleRows(i * dim_, dim_) = l.template cast<Scalar>();
      left_adj_.middleRows(i * dim_, dim_) = l.adjoint().template cast<Scalar>();
      right_t_.middleRows(i * dim_, dim_) = r.transpose().template cast<Scalar>();
      right_c_.middleRows(i * dim_, dim_) = r.conjugate().template cast<Scalar>();
    }
  }

  Mat apply(const Mat& v, bool adjoint) {
    products_.noalias() = (adjoint ? left_adj_ : left_) * v;
    for (int j = 0; j < n_; ++j) {
      auto block = mixed_.middleCols(j * dim_, dim_);
      block.setZero();
      for (int i = 0; i < n_; ++i) {
        const Scalar a = adjoint ? std::conj(alpha_(i, j)) : alpha_(i, j);
        if (a != Scalar(0)) block += a * products_.middleRows(i * dim_, dim_);
      }
    }
    Mat out(dim_, dim_);
    out.noalias() = mixed_ * (adjoint ? right_c_ : right_t_);
    return out;
  }

  int dim() const { return dim_; }

 private:
  int n_;
  int dim_;
  Mat alpha_;
  Mat left_;
  Mat left_adj_;
  Mat right_t_;
  Mat right_c_;
  Mat products_;
  Mat mixed_;
};

template <typename Mat>
typename Mat::Scalar inner(const Mat& u, const Mat& v) {
  return (u.array() * v.array().conjugate()).sum();
}

template <typename Mat>
void orthogonalize(Mat& x, const std::vector<Mat>& basis) {
  // Two passes of classical Gram-Schmidt keep the Krylov basis orthonormal.
  for (int pass = 0; pass < 2; ++pass) {
    for (const Mat& q : basis) x -= inner(x, q) * q;
  }
}

template <typename Scalar>
TopSingular lanczos(const KroneckerSumOperator& op, const LanczosOptions& options, RandomSeed seed) {
  using Mat = typename KronKernel<Scalar>::Mat;
  using Real = typename Scalar::value_type;
  KronKernel<Scalar> kernel(op.alpha(), op.left(), op.right());
  const int dim = kernel.dim();
  Engine engine = make_engine(seed);
  Mat v = draw_gaussian(engine, dim, dim, Field::Complex).template cast<Scalar>();
  v /= v.norm();

  std::vector<Mat> us;
  std::vector<Mat> vs;
  std::vector<double> alphas;
  std::vector<double> betas;
  vs.push_back(v);
  Mat u = kernel.apply(v, false);
  double alpha = u.norm();

  TopSingular out;
  double previous = 0.0;
  Eigen::VectorXd left_coeff;
  Eigen::VectorXd right_coeff;
  for (int step = 1; step <= options.max_steps; ++step) {
    if (alpha == 0.0) break;
    u /= static_cast<Real>(alpha);
    us.push_back(u);
    alphas.push_back(alpha);

    // A V_k = U_k B_k with B_k upper bidiagonal.
    const int k = static_cast<int>(alphas.size());
    Eigen::MatrixXd bidiag = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      bidiag(i, i) = alphas[static_cast<std::size_t>(i)];
      if (i + 1 < k) bidiag(i, i + 1) = betas[static_cast<std::size_t>(i)];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> small(bidiag, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double ritz = small.singularValues()(0);
    out.steps = step;
    out.value = ritz;
    left_coeff = small.matrixU().col(0);
    right_coeff = small.matrixV().col(0);
    if (step > 1 && std::abs(ritz - previous) <= options.relative_tolerance * ritz) {
      out.converged = true;
      break;
    }
    previous = ritz;
    if (step == options.max_steps) break;

    Mat next_v = kernel.apply(u, true) - static_cast<Real>(alpha) * vs.back();
    orthogonalize(next_v, vs);
    const double beta = next_v.norm();
    if (beta <= 1e-12 * ritz) {
      out.converged = true;  // invariant subspace
      break;
    }
    next_v /= static_cast<Real>(beta);
    vs.push_back(next_v);
    betas.push_back(beta);

    u = kernel.apply(next_v, false) - static_cast<Real>(beta) * us.back();
    orthogonalize(u, us);
    alpha = u.norm();
  }
  out.left = Matrix::Zero(dim, dim);
  out.right = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < left_coeff.size(); ++i) {
    out.left += left_coeff(i) * us[static_cast<std::size_t>(i)].template cast<Complex>();
    out.right += right_coeff(i) * vs[static_cast<std::size_t>(i)].template cast<Complex>();
  }
  return out;
}

}  // namespace

KroneckerSumOperator::KroneckerSumOperator(Matrix alpha, std::vector<Matrix> left,
                                           std::vector<Matrix> right)
    : alpha_(std::move(alpha)), left_(std::move(left)), right_(std::move(right)) {
  const auto n = static_cast<std::size_t>(alpha_.rows());
  if (n == 0 || alpha_.cols() != alpha_.rows()) throw DomainError("alpha must be a non-empty square matrix");
  if (left_.size() != n || right_.size() != n) {
    throw DomainError("need " + std::to_string(n) + " matrices on each side");
  }
  const Eigen::Index dim = left_.front().rows();
  for (const auto* side : {&left_, &right_}) {
    for (const Matrix& y : *side) {
      if (y.rows() != dim || y.cols() != dim) throw DomainError("all factors must share one square size");
    }
  }
}

Matrix KroneckerSumOperator::apply(const Matrix& v) const {
  KronKernel<Complex> kernel(alpha_, left_, right_);
  return kernel.apply(v, false);
}

Matrix KroneckerSumOperator::apply_adjoint(const Matrix& w) const {
  KronKernel<Complex> kernel(alpha_, left_, right_);
  return kernel.apply(w, true);
}

Matrix KroneckerSumOperator::dense(std::size_t cap) const {
  const auto dim = static_cast<std::size_t>(local_dim());
  const std::size_t entries = dim * dim * dim * dim;
  if (entries > cap) {
    throw ResourceError("Kronecker sum needs " + std::to_string(entries) +
                        " entries, above the materialization cap of " + std::to_string(cap));
  }
  const Eigen::Index big = local_dim() * local_dim();
  Matrix out = Matrix::Zero(big, big);
  for (int i = 0; i < n(); ++i) {
    for (int j = 0; j < n(); ++j) {
      if (alpha_(i, j) == 0.0) continue;
      const Matrix& a = left_[static_cast<std::size_t>(i)];
      const Matrix& b = right_[static_cast<std::size_t>(j)];
      for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
          out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) += alpha_(i, j) * a(r, c) * b;
        }
      }
    }
  }
  return out;
}

Matrix KroneckerSumOperator::alpha_gradient(const Matrix& x, const Matrix& y) const {
  const int count = n();
  Matrix out(count, count);
  const Matrix y_adj = y.adjoint();
  for (int i = 0; i < count; ++i) {
    const Matrix s = y_adj * left_[static_cast<std::size_t>(i)] * x;
    for (int j = 0; j < count; ++j) {
      out(i, j) = (s.array() * right_[static_cast<std::size_t>(j)].array()).sum();
    }
  }
  return out;
}

TopSingular top_singular_value(const KroneckerSumOperator& op, const LanczosOptions& options,
                               RandomSeed seed) {
  if (options.max_steps < 1) throw DomainError("Lanczos needs at least one step");
  if (options.single_precision) return lanczos<std::complex<float>>(op, options, seed);
  return lanczos<Complex>(op, options, seed);
}

}  // namespace tensorlab
