#include "lowrank/trimmed_pca.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "lowrank/errors.hpp"
#include "lowrank/kernels.hpp"

namespace lowrank {

double calibrate_threshold(const SampleBatch& batch, double quantile) {
  if (batch.size() == 0)
    throw std::invalid_argument("calibrate_threshold: empty batch");
  if (quantile <= 0.5 || quantile >= 1.0)
    throw std::invalid_argument("calibrate_threshold: quantile must be in (0.5, 1)");
  std::vector<double> magnitudes(static_cast<std::size_t>(batch.size()));
  for (std::int64_t i = 0; i < batch.size(); ++i)
    magnitudes[static_cast<std::size_t>(i)] = std::abs(batch.ys[i]);
  const auto rank = std::min<std::size_t>(
      magnitudes.size() - 1,
      static_cast<std::size_t>(quantile * static_cast<double>(magnitudes.size())));
  std::nth_element(magnitudes.begin(), magnitudes.begin() + rank,
                   magnitudes.end());
  return magnitudes[rank];
}

Eigen::MatrixXd empirical_trimmed_matrix(const SampleBatch& batch,
                                         const Eigen::MatrixXd& partial,
                                         double tau) {
  const Eigen::Index n = batch.xs.rows();
  if (partial.cols() >= n)
    throw std::invalid_argument("empirical_trimmed_matrix: need ell < n");
  if (partial.cols() > 0) {
    if (partial.rows() != n)
      throw std::invalid_argument("empirical_trimmed_matrix: partial dimension mismatch");
    const Eigen::MatrixXd gram = partial.transpose() * partial;
    if ((gram - Eigen::MatrixXd::Identity(partial.cols(), partial.cols()))
            .norm() > 1e-8)
      throw std::invalid_argument(
          "empirical_trimmed_matrix: partial directions not orthonormal");
  }

  std::int64_t kept = 0;
  Eigen::MatrixXd acc =
      kernels::masked_second_moment(batch.xs, batch.ys, partial, tau, &kept);
  acc -= static_cast<double>(kept) * Eigen::MatrixXd::Identity(n, n);
  acc /= static_cast<double>(batch.size());

  if (partial.cols() > 0) {
    // Projector sandwich Pi acc Pi with Pi = I - U U^T, expanded so no n x n
    // projector matrix is formed.
    const Eigen::MatrixXd ua = partial.transpose() * acc;      // ell x n
    const Eigen::MatrixXd uau = ua * partial;                  // ell x ell
    acc -= partial * ua;
    acc -= ua.transpose() * partial.transpose();
    acc += partial * uau * partial.transpose();
  }
  acc = 0.5 * (acc + acc.transpose()).eval();
  return acc;
}

EigenPair top_eigenpair(const Eigen::MatrixXd& A, double tol, int max_iter) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw std::invalid_argument("top_eigenpair: not square");
  const double scale = A.cwiseAbs().maxCoeff();
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, scale))
    throw std::invalid_argument("top_eigenpair: matrix not symmetric");

  EigenPair out;
  out.vector = Eigen::VectorXd::Unit(n, 0);
  if (scale == 0.0) return out;  // zero matrix: eigenvalue 0, vector e1

  // Row-sum bound on the spectral radius; A + shift*Id is psd, so its top
  // eigenvalue is the algebraically largest one of A, shifted.
  const double shift = A.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::VectorXd v = out.vector;
  Eigen::VectorXd w(n);
  double rayleigh = 0.0;
  bool converged = false;
  for (int iter = 0; iter < max_iter; ++iter) {
    w.noalias() = A * v + shift * v;
    const double norm = w.norm();
    if (norm == 0.0) {
      // v lies in the kernel of the shifted matrix; restart deterministically.
      v = Eigen::VectorXd::Unit(n, (iter + 1) % n);
      continue;
    }
    v = w / norm;
    w.noalias() = A * v + shift * v;
    rayleigh = v.dot(w);
    if ((w - rayleigh * v).norm() <= tol * std::max(1.0, shift)) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw numerical_guard_error("top_eigenpair: power iteration did not converge");

  // Sign convention: largest-magnitude entry positive, lowest index on ties.
  Eigen::Index pivot = 0;
  for (Eigen::Index i = 1; i < n; ++i)
    if (std::abs(v[i]) > std::abs(v[pivot])) pivot = i;
  if (v[pivot] < 0) v = -v;

  out.value = rayleigh - shift;
  out.vector = v;
  return out;
}

namespace {

double pick_threshold(const SampleBatch& batch, const TrimConfig& config) {
  if (config.tau > 0.0) return config.tau;
  if (!config.quantile_grid_search)
    return calibrate_threshold(batch, config.quantile);
  const Eigen::MatrixXd no_partial(batch.xs.rows(), 0);
  double best_tau = 0.0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (double q : {0.75, 0.80, 0.85, 0.90, 0.95}) {
    const double tau = calibrate_threshold(batch, q);
    const Eigen::MatrixXd m = empirical_trimmed_matrix(batch, no_partial, tau);
    const EigenPair top = top_eigenpair(m, 1e-8, 20000);
    if (top.value > best_value) {
      best_value = top.value;
      best_tau = tau;
    }
  }
  return best_tau;
}

}  // namespace

Frame trimmed_pca(SamplingOracle& oracle, int n, int r,
                  const TrimConfig& config) {
  if (r < 1 || r > n) throw std::invalid_argument("trimmed_pca: need 1 <= r <= n");
  if (config.tau <= 0.0 && (config.quantile <= 0.5 || config.quantile >= 1.0))
    throw std::invalid_argument("trimmed_pca: need tau > 0 or a valid quantile");
  if (config.samples_per_round < n)
    throw std::invalid_argument("trimmed_pca: samples_per_round must be >= n");

  Eigen::MatrixXd found(n, 0);
  double tau = config.tau;
  for (int ell = 0; ell < r; ++ell) {
    const SampleBatch batch = oracle.draw(config.samples_per_round);
    if (ell == 0) tau = pick_threshold(batch, config);
    const Eigen::MatrixXd m = empirical_trimmed_matrix(batch, found, tau);
    const EigenPair top =
        top_eigenpair(m, config.eig_tol, config.eig_max_iter);
    if (top.value < config.eigenvalue_floor) {
      std::fprintf(stderr,
                   "trimmed_pca: round %d top eigenvalue %.3e below floor %.3e "
                   "(threshold tau=%.4f miscalibrated?)\n",
                   ell, top.value, config.eigenvalue_floor, tau);
      throw numerical_guard_error(
          "trimmed_pca: top eigenvalue below floor in round " +
          std::to_string(ell));
    }
    found.conservativeResize(n, ell + 1);
    found.col(ell) = top.vector;
  }

  // Each direction is orthogonal to its predecessors only up to solver
  // tolerance; a final QR removes the drift.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(found);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
  const Eigen::MatrixXd r_factor =
      qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  for (int j = 0; j < r; ++j)
    if (r_factor(j, j) < 0) q.col(j) = -q.col(j);
  return Frame(std::move(q));
}

}  // namespace lowrank
