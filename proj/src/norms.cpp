#include "tensorlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tensorlab/errors.hpp"

namespace tensorlab {

namespace {

// Rounding slack allowed when asserting that an ascent step did not decrease
// the objective.
constexpr double kMonotoneSlack = 1e-12;
// Coefficients below this modulus keep their previous phase.
constexpr double kPhaseFloor = 1e-14;

// Decides whether an ascent sequence has converged. The sequence is assumed
// to converge linearly; the remaining error is extrapolated from the ratio of
// successive gains so that a slow rate does not stop the iteration early.
class StoppingRule {
 public:
  explicit StoppingRule(double tolerance) : tolerance_(tolerance) {}

  bool done(double gain, double value) {
    const double scale = std::max(value, 1e-300);
    const double previous = previous_gain_;
    previous_gain_ = gain;
    if (gain <= 1e-14 * scale) return true;
    if (gain > tolerance_ * scale) return false;
    if (previous <= 0.0) return false;
    const double rate = gain / previous;
    if (rate >= 1.0) return false;
    return gain * rate / (1.0 - rate) <= tolerance_ * scale;
  }

 private:
  double tolerance_;
  double previous_gain_ = -1.0;
};

void check_monotone(double before, double after, const char* where) {
  if (after < before * (1.0 - kMonotoneSlack) - 1e-300) {
    throw std::logic_error(std::string(where) + ": objective decreased from " +
                           std::to_string(before) + " to " + std::to_string(after));
  }
}

Matrix unit_hs(Engine& engine, int n, Field field) {
  Matrix m = draw_gaussian(engine, n, n, field);
  return m / m.norm();
}

Matrix column(const Vector& v) { return Matrix(v); }

double prod_dims(const std::vector<int>& dims) {
  double p = 1.0;
  for (int n : dims) p *= n;
  return p;
}

bool has_imaginary_part(const DenseTensor& t) {
  return t.entries().imag().cwiseAbs().maxCoeff() > 0.0;
}

std::vector<Vector> as_vectors(std::span<const Matrix> witness) {
  std::vector<Vector> out;
  out.reserve(witness.size());
  for (const Matrix& m : witness) out.emplace_back(m.col(0));
  return out;
}

}  // namespace

void SolverConfig::validate() const {
  if (restarts < 1) throw DomainError("solver.restarts must be positive");
  if (max_iterations < 1) throw DomainError("solver.max_iterations must be positive");
  if (!(relative_tolerance > 0.0) || !std::isfinite(relative_tolerance)) {
    throw DomainError("solver.relative_tolerance must be positive");
  }
}

double spectral_norm_svd(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double spectral_norm_power(const Matrix& m, double tolerance, int max_iterations) {
  if (m.size() == 0) return 0.0;
  Engine engine = make_engine(RandomSeed{0x5eedULL});
  Vector x = draw_gaussian(engine, static_cast<int>(m.cols()), Field::Complex);
  x.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Vector y = m * x;
    const double next = y.squaredNorm();  // Rayleigh quotient of M^*M at x
    Vector z = m.adjoint() * y;
    const double zn = z.norm();
    if (zn == 0.0) return std::sqrt(next);
    x = z / zn;
    if (it > 0 && std::abs(next - estimate) <= tolerance * next) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return std::sqrt(estimate);
}

double spectral_norm(const Matrix& m) {
  if (std::max(m.rows(), m.cols()) <= kSvdSizeLimit) return spectral_norm_svd(m);
  return spectral_norm_power(m);
}

double s21_quasinorm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  const auto& sigma = svd.singularValues();  // non-increasing
  double sum = 0.0;
  for (Eigen::Index j = 0; j < sigma.size(); ++j) sum += sigma(j) / std::sqrt(static_cast<double>(j + 1));
  return sum;
}

EstimateResult injective_norm_lower(const GaussianPairForm& form, const SolverConfig& config,
                                    RandomSeed seed) {
  config.validate();
  if (form.order() < 2) throw DomainError("injective_norm_lower needs order d >= 2");
  const int d = form.order();
  const int n = form.n();

  EstimateResult result;
  result.seed = seed;
  double best = -1.0;
  for (int r = 0; r < config.restarts; ++r) {
    Engine engine = make_engine(derive_seed(seed, static_cast<std::uint64_t>(r)));
    std::vector<Matrix> mats;
    for (int m = 0; m < d; ++m) mats.push_back(unit_hs(engine, n, form.field()));

    double value = std::abs(evaluate_form(form, mats));
    StoppingRule rule(config.relative_tolerance);
    bool degenerate = false;
    bool converged = false;
    int sweeps = 0;
    while (sweeps < config.max_iterations) {
      ++sweeps;
      double current = value;
      for (int m = 0; m < d; ++m) {
        const Matrix grad = mode_gradient(form, mats, m);
        const double gn = grad.norm();
        if (!(gn > 0.0) || !std::isfinite(gn)) {
          degenerate = true;
          continue;
        }
        mats[static_cast<std::size_t>(m)] = grad.conjugate() / gn;
        current = gn;
      }
      check_monotone(value, current, "injective_norm_lower");
      const double gain = current - value;
      value = current;
      if (rule.done(gain, value)) {
        converged = !degenerate;
        break;
      }
    }
    result.iterations_per_restart.push_back(sweeps);
    result.converged.push_back(converged);
    if (value > best) {
      best = value;
      result.witness = mats;
    }
  }
  result.restarts_used = config.restarts;
  result.value = std::abs(evaluate_form(form, result.witness));
  return result;
}

EstimateResult injective_norm_lower(const DenseTensor& tensor, const SolverConfig& config,
                                    RandomSeed seed) {
  config.validate();
  if (tensor.order() < 2) throw DomainError("injective_norm_lower needs order d >= 2");
  const int d = tensor.order();
  const Field field = tensor.field();

  EstimateResult result;
  result.seed = seed;
  double best = -1.0;
  std::vector<Vector> best_vectors;
  for (int r = 0; r < config.restarts; ++r) {
    Engine engine = make_engine(derive_seed(seed, static_cast<std::uint64_t>(r)));
    std::vector<Vector> xs;
    for (int m = 0; m < d; ++m) {
      Vector x = draw_gaussian(engine, tensor.dims()[static_cast<std::size_t>(m)], field);
      xs.push_back(x / x.norm());
    }
    double value = std::abs(tensor.contract(xs));
    StoppingRule rule(config.relative_tolerance);
    bool degenerate = false;
    bool converged = false;
    int sweeps = 0;
    while (sweeps < config.max_iterations) {
      ++sweeps;
      double current = value;
      for (int m = 0; m < d; ++m) {
        const Vector grad = tensor.contract_except(m, xs);
        const double gn = grad.norm();
        if (!(gn > 0.0) || !std::isfinite(gn)) {
          degenerate = true;
          continue;
        }
        xs[static_cast<std::size_t>(m)] = grad.conjugate() / gn;
        current = gn;
      }
      check_monotone(value, current, "injective_norm_lower");
      const double gain = current - value;
      value = current;
      if (rule.done(gain, value)) {
        converged = !degenerate;
        break;
      }
    }
    result.iterations_per_restart.push_back(sweeps);
    result.converged.push_back(converged);
    if (value > best) {
      best = value;
      best_vectors = xs;
    }
  }
  result.restarts_used = config.restarts;
  for (const Vector& x : best_vectors) result.witness.push_back(column(x));
  result.value = std::abs(tensor.contract(best_vectors));
  return result;
}

double unimodular_objective(const DenseTensor& tensor, std::span<const Matrix> witness) {
  const std::vector<Vector> xs = as_vectors(witness);
  return std::abs(tensor.contract(xs));
}

EstimateResult unimodular_sup(const DenseTensor& tensor, Field field, const SolverConfig& config,
                              RandomSeed seed) {
  config.validate();
  if (tensor.order() < 2) throw DomainError("unimodular_sup needs order d >= 2");
  if (field == Field::Real && has_imaginary_part(tensor)) {
    throw DomainError("unimodular_sup over the real field needs a real tensor");
  }
  const int d = tensor.order();

  EstimateResult result;
  result.seed = seed;
  double best = -1.0;
  std::vector<Vector> best_vectors;
  for (int r = 0; r < config.restarts; ++r) {
    Engine engine = make_engine(derive_seed(seed, static_cast<std::uint64_t>(r)));
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::bernoulli_distribution coin(0.5);
    std::vector<Vector> xs;
    for (int m = 0; m < d; ++m) {
      const int len = tensor.dims()[static_cast<std::size_t>(m)];
      Vector x(len);
      for (int i = 0; i < len; ++i) {
        x[i] = field == Field::Real ? Complex(coin(engine) ? 1.0 : -1.0, 0.0)
                                    : std::polar(1.0, angle(engine));
      }
      xs.push_back(std::move(x));
    }
    double value = std::abs(tensor.contract(xs));
    StoppingRule rule(config.relative_tolerance);
    bool converged = false;
    int sweeps = 0;
    while (sweeps < config.max_iterations) {
      ++sweeps;
      double current = value;
      for (int m = 0; m < d; ++m) {
        const Vector coeff = tensor.contract_except(m, xs);
        Vector& x = xs[static_cast<std::size_t>(m)];
        for (Eigen::Index i = 0; i < coeff.size(); ++i) {
          const double mod = std::abs(coeff[i]);
          if (mod < kPhaseFloor) continue;
          x[i] = field == Field::Real ? Complex(coeff[i].real() >= 0.0 ? 1.0 : -1.0, 0.0)
                                      : std::conj(coeff[i]) / mod;
        }
        current = std::abs((coeff.array() * x.array()).sum());
      }
      check_monotone(value, current, "unimodular_sup");
      const double gain = current - value;
      value = current;
      if (rule.done(gain, value)) {
        converged = true;
        break;
      }
    }
    result.iterations_per_restart.push_back(sweeps);
    result.converged.push_back(converged);
    if (value > best) {
      best = value;
      best_vectors = xs;
    }
  }
  result.restarts_used = config.restarts;
  for (const Vector& x : best_vectors) result.witness.push_back(column(x));
  result.value = std::abs(tensor.contract(best_vectors));

  // Cauchy-Schwarz envelope: |sum t x| <= ||t||_F ||x||_2 with ||x||_2^2 = prod dims.
  const double envelope = std::sqrt(prod_dims(tensor.dims())) * tensor.frobenius_norm();
  if (result.value > envelope * (1.0 + 1e-12)) {
    throw std::logic_error("unimodular_sup exceeded its Cauchy-Schwarz envelope");
  }
  return result;
}

EstimateResult unimodular_sup_exhaustive_real(const DenseTensor& tensor) {
  if (tensor.order() < 2) throw DomainError("unimodular_sup_exhaustive_real needs order d >= 2");
  if (has_imaginary_part(tensor)) throw DomainError("exhaustive sign search needs a real tensor");
  const int d = tensor.order();
  int bits = 0;
  for (int m = 0; m + 1 < d; ++m) bits += tensor.dims()[static_cast<std::size_t>(m)];
  // The first sign is fixed to +1; flipping a whole mode only negates the value.
  const int free_bits = bits - 1;
  if (free_bits > 40) throw ResourceError("exhaustive sign enumeration over 2^" +
                                          std::to_string(free_bits) + " assignments refused");

  std::vector<Vector> xs;
  for (int m = 0; m < d; ++m) xs.emplace_back(Vector::Ones(tensor.dims()[static_cast<std::size_t>(m)]));
  std::vector<Vector> best_vectors = xs;
  double best = -1.0;
  const std::uint64_t total = std::uint64_t{1} << free_bits;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    int bit = 0;
    for (int m = 0; m + 1 < d; ++m) {
      Vector& x = xs[static_cast<std::size_t>(m)];
      for (Eigen::Index i = 0; i < x.size(); ++i, ++bit) {
        if (bit == 0) {
          x[i] = 1.0;
          continue;
        }
        x[i] = ((mask >> (bit - 1)) & 1U) ? -1.0 : 1.0;
      }
    }
    const Vector coeff = tensor.contract_except(d - 1, xs);
    const double value = coeff.cwiseAbs().sum();
    if (value > best) {
      best = value;
      best_vectors = xs;
      Vector& last = best_vectors.back();
      for (Eigen::Index k = 0; k < coeff.size(); ++k) last[k] = coeff[k].real() >= 0.0 ? 1.0 : -1.0;
    }
  }
  EstimateResult result;
  result.restarts_used = 1;
  result.iterations_per_restart.push_back(static_cast<int>(std::min<std::uint64_t>(total, 1U << 30)));
  result.converged.push_back(true);
  for (const Vector& x : best_vectors) result.witness.push_back(column(x));
  result.value = std::abs(tensor.contract(best_vectors));
  return result;
}

double min_norm_lower_rankone(const GaussianPairForm& form) {
  return form.g().norm() * form.g_prime().norm();
}

ProjectionSupremum projection_supremum_mc(const GaussianPairForm& form, std::span<const int> ranks,
                                          int samples, const SolverConfig& config, RandomSeed seed) {
  config.validate();
  const int d = form.order();
  const int n = form.n();
  if (static_cast<int>(ranks.size()) != d) throw DomainError("one rank per mode required");
  double rank_product = 1.0;
  for (int r : ranks) {
    if (r < 1 || r > n) {
      throw DomainError("projection rank " + std::to_string(r) + " outside 1.." + std::to_string(n));
    }
    rank_product *= r;
  }
  if (samples < 1) throw DomainError("samples must be positive");
  const double scale = 1.0 / std::sqrt(rank_product);

  ProjectionSupremum out;
  out.estimate.seed = seed;
  std::vector<Matrix> best;
  double best_value = -1.0;
  for (int s = 0; s < samples; ++s) {
    const RandomSeed sample_seed = derive_seed(seed, static_cast<std::uint64_t>(s));
    std::vector<Matrix> projs;
    for (int m = 0; m < d; ++m) {
      projs.push_back(sample_projection(n, ranks[static_cast<std::size_t>(m)],
                                        derive_seed(sample_seed, static_cast<std::uint64_t>(m)),
                                        form.field()));
    }
    const double value = scale * std::abs(evaluate_form(form, projs));
    if (value > best_value) {
      best_value = value;
      best = std::move(projs);
    }
  }
  out.best_sample_value = best_value;

  // Refinement: with the other modes fixed, Z is linear in P_m, so the best
  // rank-r projection aligns with the top-r eigenspace of the Hermitian part of
  // the phase-rotated gradient.
  double value = best_value;
  StoppingRule rule(config.relative_tolerance);
  int sweeps = 0;
  bool converged = false;
  while (sweeps < config.max_iterations) {
    ++sweeps;
    double current = value;
    for (int m = 0; m < d; ++m) {
      const int rank = ranks[static_cast<std::size_t>(m)];
      if (rank == n) continue;
      const Matrix grad = mode_gradient(form, best, m);
      const Complex z = pair(best[static_cast<std::size_t>(m)], grad);
      const Complex phase = std::abs(z) > 0.0 ? z / std::abs(z) : Complex(1.0, 0.0);
      const Matrix rotated = (std::conj(phase) * grad).transpose();
      const Matrix herm = (rotated + rotated.adjoint()) / 2.0;
      Eigen::SelfAdjointEigenSolver<Matrix> eig(herm);
      const Matrix top = eig.eigenvectors().rightCols(rank);
      Matrix proj = top * top.adjoint();
      proj = (proj + proj.adjoint()) / 2.0;
      if (form.field() == Field::Real) proj = Matrix(proj.real().cast<Complex>());
      const double candidate = scale * std::abs(evaluate_form(form, [&] {
        std::vector<Matrix> trial = best;
        trial[static_cast<std::size_t>(m)] = proj;
        return trial;
      }()));
      if (candidate >= current) {
        best[static_cast<std::size_t>(m)] = std::move(proj);
        current = candidate;
      }
    }
    check_monotone(value, current, "projection_supremum_mc");
    const double gain = current - value;
    value = current;
    if (rule.done(gain, value)) {
      converged = true;
      break;
    }
  }
  out.estimate.restarts_used = samples;
  out.estimate.iterations_per_restart.push_back(sweeps);
  out.estimate.converged.push_back(converged);
  out.estimate.value = scale * std::abs(evaluate_form(form, best));
  out.estimate.witness = std::move(best);
  return out;
}

double empirical_lp_norm(std::span<const double> samples, double p) {
  if (samples.empty()) throw DomainError("empirical_lp_norm needs at least one sample");
  if (!(p >= 1.0)) throw DomainError("empirical_lp_norm needs p >= 1");
  double sum = 0.0;
  for (double x : samples) sum += std::pow(std::abs(x), p);
  return std::pow(sum / static_cast<double>(samples.size()), 1.0 / p);
}

}  // namespace tensorlab
