#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "lowrank/hermite.hpp"
#include "lowrank/subspace.hpp"

namespace lowrank {

/// A full hypothesis Theta = (c, V).
struct Parameters {
  CoefficientVector coef;
  Frame frame;

  Parameters(CoefficientVector c, Frame f);
};

/// Covariates and responses: column i of xs is sample i; ys[i] = P(xs_i)
/// exactly (the model is noiseless).
struct SampleBatch {
  Eigen::MatrixXd xs;  // n x N
  Eigen::VectorXd ys;  // N

  std::int64_t size() const { return ys.size(); }
};

/// E[grad p(g) grad p(g)^T] over g ~ N(0, Id_r), computed exactly: entry
/// (i, j) is the dot product of the derivative coefficient vectors, by
/// orthonormality of the basis.
Eigen::MatrixXd gradient_second_moment(const CoefficientVector& c);

/// alpha = lambda_min(M) / lambda_max(M) of the gradient second moment.
/// Zero means the polynomial has effective rank < r. Throws for an
/// identically-constant polynomial.
double certify_nondegeneracy(const CoefficientVector& c);

/// Ground-truth realization (c*, V*) plus cached metadata. Normalized so
/// that E[P] = 0 (constant coefficient zero) and lambda_max(M) = 1.
class Instance {
public:
  Instance(Parameters truth, double alpha, double y_variance);

  const Parameters& truth() const { return truth_; }
  const CoefficientVector& coef() const { return truth_.coef; }
  const Frame& frame() const { return truth_.frame; }
  double alpha() const { return alpha_; }
  double y_variance() const { return y_variance_; }
  int n() const { return truth_.frame.n(); }
  int r() const { return truth_.frame.r(); }
  int d() const { return truth_.coef.d; }

private:
  Parameters truth_;
  double alpha_;
  double y_variance_;
};

/// Zeroes the constant coefficient and rescales so lambda_max(M) = 1.
/// Throws for degenerate coefficients (alpha = 0 within 1e-10).
Instance make_instance(const CoefficientVector& c_raw, Frame v_star);

/// Rejection-samples Gaussian coefficient vectors until the non-degeneracy
/// certificate reaches alpha_min, then normalizes. Deterministic per seed.
Instance random_instance(int n, int r, int d, std::uint64_t seed,
                         double alpha_min, int max_rejections = 1000);

/// N iid covariates x ~ N(0, Id_n) with exact responses. Deterministic per
/// seed and identical whether rows are generated in parallel or serially.
SampleBatch sample_batch(const Instance& inst, std::int64_t N,
                         std::uint64_t seed);

/// F_x(Theta) = p_c(V^T x).
double predict(const Parameters& theta, const Eigen::VectorXd& x);

/// Euclidean gradients of F_x: d/dV = x * (grad p(V^T x))^T and
/// d/dc = Phi(V^T x).
Eigen::MatrixXd grad_frame(const Parameters& theta, const Eigen::VectorXd& x);
Eigen::VectorXd grad_coef(const Parameters& theta, const Eigen::VectorXd& x);

/// (1/N) sum (F_x(Theta) - y)^2 / y_variance.
double prediction_error(const Parameters& theta, const SampleBatch& batch,
                        double y_variance);

/// Coefficients of z -> p(Q z) for orthogonal Q, by Gauss-Hermite projection
/// (exact: 2d+2 nodes per coordinate). (c, V) and (rotate_coefficients(c, Q),
/// V Q) realize the same polynomial of x.
CoefficientVector rotate_coefficients(const CoefficientVector& c,
                                      const Eigen::MatrixXd& Q);

/// ||c_hat - c*_aligned||_2 where c*_aligned realizes the truth on the frame
/// V* align(V_hat, V*), the rotation bringing the truth closest to V_hat.
double aligned_coefficient_error(const Parameters& estimate,
                                 const Parameters& truth);

/// Hands out (x, y) samples from an instance; the learning phases see only
/// this interface, never the realization. Draws are deterministic per
/// (seed, draw index) and counted for the sample-complexity trace.
class SamplingOracle {
public:
  SamplingOracle(const Instance& inst, std::uint64_t seed)
      : inst_(&inst), seed_(seed) {}

  SampleBatch draw(std::int64_t N);
  std::int64_t samples_drawn() const { return samples_drawn_; }
  int ambient_dimension() const { return inst_->n(); }

private:
  const Instance* inst_;
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::int64_t samples_drawn_ = 0;
};

}  // namespace lowrank
