#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace lowrank {

/// An n x r matrix with orthonormal columns: a point on the Stiefel
/// manifold, i.e. a basis of a candidate subspace.
///
/// Construction verifies the orthonormality defect ||V^T V - Id||_F:
/// accepted as-is up to 1e-9, re-orthonormalized by QR up to 1e-6, and
/// rejected beyond that (large defects indicate a bug upstream, not drift).
class Frame {
public:
  explicit Frame(Eigen::MatrixXd columns);

  int n() const { return static_cast<int>(columns_.rows()); }
  int r() const { return static_cast<int>(columns_.cols()); }
  const Eigen::MatrixXd& columns() const { return columns_; }

  double orthonormality_defect() const;

  static constexpr double kAcceptDefect = 1e-9;
  static constexpr double kRepairDefect = 1e-6;

private:
  Eigen::MatrixXd columns_;
};

/// Principal angles between two frames, non-decreasing in [0, pi/2].
struct PrincipalAngles {
  Eigen::VectorXd angles;
};

/// QR-orthonormalization of an n x r standard Gaussian matrix (R diagonal
/// made positive), giving a Haar-distributed column span. Deterministic per
/// seed.
Frame random_frame(int n, int r, std::uint64_t seed);

PrincipalAngles principal_angles(const Frame& V, const Frame& W);

/// d_P = min_{O in O(r)} ||V - W O||_F = 2 (sum_i sin^2(theta_i / 2))^{1/2},
/// computed from the singular values of V^T W.
double procrustes_distance(const Frame& V, const Frame& W);

/// d_C = (r - ||V^T W||_F^2)^{1/2} = (sum_i sin^2 theta_i)^{1/2}.
double chordal_distance(const Frame& V, const Frame& W);

/// The r x r orthogonal minimizer O* of ||V - W O||_F, from the SVD of
/// W^T V. Used to rotate a ground-truth frame onto an iterate before
/// comparing coefficients.
Eigen::MatrixXd align(const Frame& V, const Frame& W);

/// ||Pi_V u||_2 = ||V^T u||_2 for a unit vector u.
double projection_mass(const Frame& V, const Eigen::VectorXd& u);

/// Haar-ish random r x r orthogonal matrix (QR of a Gaussian square matrix
/// with positive R diagonal). Deterministic per seed.
Eigen::MatrixXd random_rotation(int r, std::uint64_t seed);

}  // namespace lowrank
