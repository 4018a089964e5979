#include "lowrank/model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lowrank/errors.hpp"
#include "lowrank/kernels.hpp"
#include "lowrank/parallel.hpp"
#include "lowrank/rng.hpp"

namespace lowrank {

Parameters::Parameters(CoefficientVector c, Frame f)
    : coef(std::move(c)), frame(std::move(f)) {
  if (coef.r != frame.r())
    throw std::invalid_argument("Parameters: coef.r must match frame.r");
}

Eigen::MatrixXd gradient_second_moment(const CoefficientVector& c) {
  const Basis& basis = Basis::get(c.r, c.d);
  std::vector<Eigen::VectorXd> derivs;
  derivs.reserve(static_cast<std::size_t>(c.r));
  for (int j = 0; j < c.r; ++j)
    derivs.push_back(basis.derivative(c, j).values);
  Eigen::MatrixXd m(c.r, c.r);
  for (int i = 0; i < c.r; ++i)
    for (int j = i; j < c.r; ++j) {
      m(i, j) = derivs[static_cast<std::size_t>(i)].dot(
          derivs[static_cast<std::size_t>(j)]);
      m(j, i) = m(i, j);
    }
  return m;
}

double certify_nondegeneracy(const CoefficientVector& c) {
  if (hermite_variance(c) == 0.0)
    throw std::invalid_argument(
        "certify_nondegeneracy: polynomial is identically constant");
  const Eigen::MatrixXd m = gradient_second_moment(c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (hi <= 0.0) return 0.0;
  return std::max(0.0, lo / hi);
}

Instance::Instance(Parameters truth, double alpha, double y_variance)
    : truth_(std::move(truth)), alpha_(alpha), y_variance_(y_variance) {
  if (truth_.coef.values[0] != 0.0)
    throw std::invalid_argument("Instance: constant coefficient must be zero");
  if (alpha_ <= 0.0 || alpha_ > 1.0 + 1e-12)
    throw std::invalid_argument("Instance: alpha must lie in (0, 1]");
  const Eigen::MatrixXd m = gradient_second_moment(truth_.coef);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.eigenvalues().maxCoeff() > 1.0 + 1e-8)
    throw std::invalid_argument("Instance: gradient moment exceeds identity");
  if (std::abs(solver.eigenvalues().minCoeff() -
               alpha_ * solver.eigenvalues().maxCoeff()) > 1e-8)
    throw std::invalid_argument("Instance: alpha inconsistent with truth");
  const double var = hermite_variance(truth_.coef);
  if (std::abs(var - y_variance_) > 1e-8 * std::max(1.0, var))
    throw std::invalid_argument("Instance: y_variance inconsistent with truth");
}

Instance make_instance(const CoefficientVector& c_raw, Frame v_star) {
  if (c_raw.r != v_star.r())
    throw std::invalid_argument("make_instance: coef.r must match frame.r");
  CoefficientVector c = c_raw;
  c.values[0] = 0.0;
  if (hermite_variance(c) == 0.0)
    throw std::invalid_argument("make_instance: polynomial has no signal");
  const Eigen::MatrixXd m = gradient_second_moment(c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  const double hi = solver.eigenvalues().maxCoeff();
  const double alpha = std::max(0.0, solver.eigenvalues().minCoeff() / hi);
  if (alpha < 1e-10)
    throw std::invalid_argument("make_instance: degenerate coefficients");
  c.values /= std::sqrt(hi);
  return Instance(Parameters(c, std::move(v_star)), alpha,
                  hermite_variance(c));
}

Instance random_instance(int n, int r, int d, std::uint64_t seed,
                         double alpha_min, int max_rejections) {
  if (alpha_min <= 0.0 || alpha_min > 1.0)
    throw std::invalid_argument("random_instance: alpha_min must be in (0, 1]");
  if (r < 1 || r > n || d < 1)
    throw std::invalid_argument("random_instance: bad dimensions");
  const std::int64_t m = basis_dimension(r, d);
  for (int attempt = 0; attempt < max_rejections; ++attempt) {
    Rng rng(derive_seed(seed, 0xC0EFu, static_cast<std::uint64_t>(attempt)));
    Eigen::VectorXd values(m);
    values[0] = 0.0;
    for (Eigen::Index i = 1; i < m; ++i) values[i] = rng.gaussian();
    CoefficientVector c(r, d, std::move(values));
    if (certify_nondegeneracy(c) < alpha_min) continue;
    return make_instance(c, random_frame(n, r, derive_seed(seed, 0xF7A3Eu)));
  }
  throw numerical_guard_error(
      "random_instance: no coefficients reached alpha_min after " +
      std::to_string(max_rejections) + " rejections");
}

SampleBatch sample_batch(const Instance& inst, std::int64_t N,
                         std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("sample_batch: need N >= 1");
  SampleBatch batch;
  batch.xs = kernels::gaussian_columns(inst.n(), N, seed);
  batch.ys.resize(N);
  const Basis& basis = Basis::get(inst.r(), inst.d());
  const Eigen::MatrixXd& v = inst.frame().columns();
  const CoefficientVector& c = inst.coef();
#pragma omp parallel num_threads(max_threads())
  {
    Basis::Workspace ws = basis.make_workspace();
    Eigen::VectorXd z(inst.r());
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < N; ++i) {
      z.noalias() = v.transpose() * batch.xs.col(i);
      batch.ys[i] = basis.eval(c, z, ws);
    }
  }
  return batch;
}

double predict(const Parameters& theta, const Eigen::VectorXd& x) {
  if (x.size() != theta.frame.n())
    throw std::invalid_argument("predict: point dimension mismatch");
  return poly_eval(theta.coef, theta.frame.columns().transpose() * x);
}

Eigen::MatrixXd grad_frame(const Parameters& theta, const Eigen::VectorXd& x) {
  if (x.size() != theta.frame.n())
    throw std::invalid_argument("grad_frame: point dimension mismatch");
  const Eigen::VectorXd z = theta.frame.columns().transpose() * x;
  return x * poly_gradient(theta.coef, z).transpose();
}

Eigen::VectorXd grad_coef(const Parameters& theta, const Eigen::VectorXd& x) {
  if (x.size() != theta.frame.n())
    throw std::invalid_argument("grad_coef: point dimension mismatch");
  const Eigen::VectorXd z = theta.frame.columns().transpose() * x;
  return Basis::get(theta.coef.r, theta.coef.d).features(z);
}

double prediction_error(const Parameters& theta, const SampleBatch& batch,
                        double y_variance) {
  if (batch.size() == 0)
    throw std::invalid_argument("prediction_error: empty batch");
  if (y_variance <= 0.0)
    throw std::invalid_argument("prediction_error: y_variance must be > 0");
  const double sum = kernels::squared_residual_sum(
      theta.coef, theta.frame.columns(), batch.xs, batch.ys);
  return sum / (static_cast<double>(batch.size()) * y_variance);
}

CoefficientVector rotate_coefficients(const CoefficientVector& c,
                                      const Eigen::MatrixXd& Q) {
  if (Q.rows() != c.r || Q.cols() != c.r)
    throw std::invalid_argument("rotate_coefficients: Q must be r x r");
  if ((Q.transpose() * Q - Eigen::MatrixXd::Identity(c.r, c.r)).norm() > 1e-8)
    throw std::invalid_argument("rotate_coefficients: Q must be orthogonal");
  const Basis& basis = Basis::get(c.r, c.d);
  const QuadratureRule rule = gauss_hermite(2 * c.d + 2);
  const int m = static_cast<int>(rule.nodes.size());

  // Tensorized quadrature over N(0, Id_r): project p(Qz) onto each phi_I.
  Eigen::VectorXd out = Eigen::VectorXd::Zero(basis.size());
  std::vector<int> digit(static_cast<std::size_t>(c.r), 0);
  Eigen::VectorXd z(c.r);
  Basis::Workspace ws = basis.make_workspace();
  Basis::Workspace ws_rot = basis.make_workspace();
  for (;;) {
    double weight = 1.0;
    for (int j = 0; j < c.r; ++j) {
      z[j] = rule.nodes[digit[static_cast<std::size_t>(j)]];
      weight *= rule.weights[digit[static_cast<std::size_t>(j)]];
    }
    const double value = basis.eval(c, Q * z, ws_rot);
    basis.features(z, ws);
    out += (weight * value) * ws.phi;

    int carry = 0;
    while (carry < c.r && ++digit[static_cast<std::size_t>(carry)] == m) {
      digit[static_cast<std::size_t>(carry)] = 0;
      ++carry;
    }
    if (carry == c.r) break;
  }
  return CoefficientVector(c.r, c.d, std::move(out));
}

double aligned_coefficient_error(const Parameters& estimate,
                                 const Parameters& truth) {
  const Eigen::MatrixXd rot = align(estimate.frame, truth.frame);
  const CoefficientVector rotated = rotate_coefficients(truth.coef, rot);
  return (estimate.coef.values - rotated.values).norm();
}

SampleBatch SamplingOracle::draw(std::int64_t N) {
  const SampleBatch batch =
      sample_batch(*inst_, N, derive_seed(seed_, 0x0DACu, draws_++));
  samples_drawn_ += N;
  return batch;
}

}  // namespace lowrank
