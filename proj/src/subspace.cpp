#include "lowrank/subspace.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "lowrank/rng.hpp"

namespace lowrank {

namespace {

// Thin QR with the R diagonal forced positive, so the result is unique and
// Gaussian inputs give Haar-distributed spans.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() *
                      Eigen::MatrixXd::Identity(m.rows(), m.cols());
  const Eigen::MatrixXd r_factor =
      qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (r_factor(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

double defect_of(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd gram = m.transpose() * m;
  return (gram - Eigen::MatrixXd::Identity(m.cols(), m.cols())).norm();
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.gaussian();
  return m;
}

}  // namespace

Frame::Frame(Eigen::MatrixXd columns) : columns_(std::move(columns)) {
  if (columns_.cols() > columns_.rows())
    throw std::invalid_argument("Frame: r must not exceed n");
  if (columns_.cols() == 0)
    throw std::invalid_argument("Frame: need at least one column");
  const double defect = defect_of(columns_);
  if (defect <= kAcceptDefect) return;
  if (defect <= kRepairDefect) {
    columns_ = orthonormalize(columns_);
    return;
  }
  throw std::invalid_argument(
      "Frame: orthonormality defect " + std::to_string(defect) +
      " exceeds repair threshold");
}

double Frame::orthonormality_defect() const { return defect_of(columns_); }

Frame random_frame(int n, int r, std::uint64_t seed) {
  if (r < 1 || r > n)
    throw std::invalid_argument("random_frame: need 1 <= r <= n");
  return Frame(orthonormalize(gaussian_matrix(n, r, seed)));
}

Eigen::MatrixXd random_rotation(int r, std::uint64_t seed) {
  return orthonormalize(gaussian_matrix(r, r, seed));
}

namespace {

void check_shapes(const Frame& V, const Frame& W, const char* op) {
  if (V.n() != W.n() || V.r() != W.r())
    throw std::invalid_argument(std::string(op) + ": frame shape mismatch");
}

Eigen::VectorXd overlap_singular_values(const Frame& V, const Frame& W) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(V.columns().transpose() * W.columns());
  return svd.singularValues();
}

}  // namespace

PrincipalAngles principal_angles(const Frame& V, const Frame& W) {
  check_shapes(V, W, "principal_angles");
  Eigen::VectorXd sigma = overlap_singular_values(V, W);
  PrincipalAngles out;
  out.angles.resize(sigma.size());
  // Singular values descending -> angles ascending. Clamp before acos:
  // rounding can push sigma past 1 and produce NaN.
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    out.angles[i] = std::acos(std::clamp(sigma[i], 0.0, 1.0));
  return out;
}

double procrustes_distance(const Frame& V, const Frame& W) {
  check_shapes(V, W, "procrustes_distance");
  const Eigen::VectorXd sigma = overlap_singular_values(V, W);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    sum += 1.0 - std::clamp(sigma[i], 0.0, 1.0);
  return std::sqrt(std::max(0.0, 2.0 * sum));
}

double chordal_distance(const Frame& V, const Frame& W) {
  check_shapes(V, W, "chordal_distance");
  const double overlap = (V.columns().transpose() * W.columns()).squaredNorm();
  return std::sqrt(std::max(0.0, static_cast<double>(V.r()) - overlap));
}

Eigen::MatrixXd align(const Frame& V, const Frame& W) {
  check_shapes(V, W, "align");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      W.columns().transpose() * V.columns(),
      Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

double projection_mass(const Frame& V, const Eigen::VectorXd& u) {
  if (u.size() != V.n())
    throw std::invalid_argument("projection_mass: vector dimension mismatch");
  if (std::abs(u.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("projection_mass: u must be a unit vector");
  return (V.columns().transpose() * u).norm();
}

}  // namespace lowrank
