#pragma once

#include <span>
#include <vector>

#include "tensorlab/dense_tensor.hpp"
#include "tensorlab/ensembles.hpp"
#include "tensorlab/pair_form.hpp"

namespace tensorlab {

struct SolverConfig {
  int restarts = 16;
  int max_iterations = 500;
  double relative_tolerance = 1e-9;

  void validate() const;
  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// A certified feasible value: `value` is the objective re-evaluated at
/// `witness`, so it lower-bounds the supremum being estimated.
struct EstimateResult {
  double value = 0.0;
  // One factor per mode: N x N matrices for pair forms, single-column
  // matrices for vector or phase variables.
  std::vector<Matrix> witness;
  int restarts_used = 0;
  std::vector<int> iterations_per_restart;
  std::vector<bool> converged;
  RandomSeed seed;
};

// Matrices up to this size use a full SVD; larger ones use power iteration.
inline constexpr int kSvdSizeLimit = 512;

double spectral_norm(const Matrix& m);
double spectral_norm_svd(const Matrix& m);
double spectral_norm_power(const Matrix& m, double tolerance = 1e-12, int max_iterations = 100000);

/// sum_j j^{-1/2} sigma_j over singular values in non-increasing order.
double s21_quasinorm(const Matrix& m);

/// Alternating maximization of |Z| over unit vectors (dense) or unit
/// Hilbert-Schmidt matrices (pair form). Iterates are real for real targets.
EstimateResult injective_norm_lower(const GaussianPairForm& form, const SolverConfig& config,
                                    RandomSeed seed);
EstimateResult injective_norm_lower(const DenseTensor& tensor, const SolverConfig& config,
                                    RandomSeed seed);

/// Alternating phase (complex) or sign (real) ascent for
/// sup |sum t(i) prod_m x_m(i_m)| over unimodular x.
EstimateResult unimodular_sup(const DenseTensor& tensor, Field field, const SolverConfig& config,
                              RandomSeed seed);

/// Exact real-sign supremum by enumerating every mode but the last; the last
/// mode is eliminated in closed form. Witness included.
EstimateResult unimodular_sup_exhaustive_real(const DenseTensor& tensor);

/// Objective of the unimodular problem at given mode vectors.
double unimodular_objective(const DenseTensor& tensor, std::span<const Matrix> witness);

/// ||g|| ||g'||, the operator norm of the rank-one bipartite reshape.
double min_norm_lower_rankone(const GaussianPairForm& form);

/// Monte Carlo supremum of (prod r_m)^{-1/2} |Z(P_1..P_d)| over rank-r_m
/// projections, refined by alternating top-eigenspace updates.
struct ProjectionSupremum {
  EstimateResult estimate;
  double best_sample_value = 0.0;
};
ProjectionSupremum projection_supremum_mc(const GaussianPairForm& form, std::span<const int> ranks,
                                          int samples, const SolverConfig& config, RandomSeed seed);

/// (mean |x|^p)^{1/p}.
double empirical_lp_norm(std::span<const double> samples, double p);

}  // namespace tensorlab
