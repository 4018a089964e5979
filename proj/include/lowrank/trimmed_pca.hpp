#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "lowrank/model.hpp"
#include "lowrank/subspace.hpp"

namespace lowrank {

/// Warm-start configuration. When tau <= 0, the threshold is calibrated as
/// the empirical `quantile` of |y| over the first round's batch (optionally
/// grid-searched over {0.75, 0.8, ..., 0.95} to maximize the round-0 top
/// eigenvalue).
struct TrimConfig {
  double tau = 0.0;
  double quantile = 0.9;
  std::int64_t samples_per_round = 0;
  double eig_tol = 1e-10;
  int eig_max_iter = 20000;
  double eigenvalue_floor = 1e-6;
  bool quantile_grid_search = false;
};

/// Empirical quantile of |y| over the batch, used as the trimming threshold.
double calibrate_threshold(const SampleBatch& batch, double quantile);

/// Pi_{V_perp} [ (1/N) sum_i 1{|y_i| > tau and max_j |<v_j, x_i>| <= 1}
///               (x_i x_i^T - Id) ] Pi_{V_perp}
/// for previously found orthonormal directions v_j (columns of `partial`,
/// may be empty). Symmetric by construction; the partial directions lie in
/// its kernel.
Eigen::MatrixXd empirical_trimmed_matrix(const SampleBatch& batch,
                                         const Eigen::MatrixXd& partial,
                                         double tau);

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
};

/// Eigenpair of algebraically largest eigenvalue (not largest magnitude) of
/// a symmetric matrix, by power iteration on A + shift*Id with the shift a
/// row-sum bound on the spectral radius. The eigenvector sign is fixed so
/// its largest-magnitude entry (lowest index on ties) is positive.
EigenPair top_eigenpair(const Eigen::MatrixXd& A, double tol, int max_iter);

/// One trimmed-PCA round per direction: draw a fresh batch, form the
/// trimmed matrix over the directions found so far, take its top
/// eigenvector. Returns the QR-polished frame of all r directions.
Frame trimmed_pca(SamplingOracle& oracle, int n, int r,
                  const TrimConfig& config);

}  // namespace lowrank
