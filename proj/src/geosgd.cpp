#include "lowrank/geosgd.hpp"

#include <cmath>
#include <stdexcept>

#include "lowrank/errors.hpp"
#include "lowrank/kernels.hpp"

namespace lowrank {

BoostConfig BoostConfig::resolved_for(int n, int r, int d,
                                      double alpha_hat) const {
  BoostConfig out = *this;
  const double nu = alpha_hat > 0.0 ? alpha_hat : 0.5;
  if (out.T_subspace <= 0) out.T_subspace = 4 * n;
  if (out.eta_coef <= 0.0) out.eta_coef = 0.05 / (d * r * r);
  if (out.eta_vec <= 0.0)
    out.eta_vec = nu / (static_cast<double>(out.T_subspace) * n * 16.0);
  if (out.T_realign <= 0)
    out.T_realign = static_cast<int>(
        std::ceil(200.0 * std::log(1.0 / std::min(0.99, out.target_eps))));
  if (out.B_realign <= 0) out.B_realign = 64;
  if (out.coef_norm_guard <= 0.0)
    out.coef_norm_guard = 1e3 * std::sqrt(static_cast<double>(r));
  out.validate();
  return out;
}

void BoostConfig::validate() const {
  if (eta_coef <= 0.0 || eta_vec <= 0.0)
    throw std::invalid_argument("BoostConfig: learning rates must be > 0");
  if (T_outer < 0 || T_realign < 1 || B_realign < 1 || T_subspace < 1)
    throw std::invalid_argument("BoostConfig: iteration counts must be >= 1");
  if (target_eps <= 0.0 || target_eps >= 1.0)
    throw std::invalid_argument("BoostConfig: target_eps must be in (0, 1)");
}

GeodesicStep compute_geodesic_step(const Parameters& theta,
                                   const Eigen::VectorXd& x, double y) {
  if (x.size() != theta.frame.n())
    throw std::invalid_argument("compute_geodesic_step: dimension mismatch");
  const Eigen::MatrixXd& v = theta.frame.columns();
  const Eigen::VectorXd z = v.transpose() * x;
  const double residual = poly_eval(theta.coef, z) - y;

  GeodesicStep step;
  step.h = 2.0 * residual * (x - v * z);
  step.nabla = poly_gradient(theta.coef, z);
  const double h_norm = step.h.norm();
  const double nabla_norm = step.nabla.norm();
  step.sigma = h_norm * nabla_norm;
  if (h_norm > 1e-14 && nabla_norm > 1e-14) {
    step.h_hat = step.h / h_norm;
    step.nabla_hat = step.nabla / nabla_norm;
    step.has_direction = true;
  } else {
    step.sigma = 0.0;
  }
  return step;
}

Frame apply_geodesic(const Frame& V, const GeodesicStep& step,
                     double eta_vec) {
  if (!step.has_direction || step.sigma == 0.0 || eta_vec == 0.0) return V;
  if (step.h.size() != V.n() || step.nabla.size() != V.r())
    throw std::invalid_argument("apply_geodesic: step dimension mismatch");
  if ((V.columns().transpose() * step.h_hat).norm() > 1e-9)
    throw std::invalid_argument("apply_geodesic: step not tangent at V");
  const double angle = step.sigma * eta_vec;
  Eigen::MatrixXd next = V.columns();
  const Eigen::VectorXd mixed = next * step.nabla_hat;
  next.noalias() +=
      (std::cos(angle) - 1.0) * mixed * step.nabla_hat.transpose();
  next.noalias() -= std::sin(angle) * step.h_hat * step.nabla_hat.transpose();
  return Frame(std::move(next));
}

CoefficientVector realign_polynomial(SamplingOracle& oracle, const Frame& V,
                                     int d, const BoostConfig& config) {
  config.validate();
  if (d < 1) throw std::invalid_argument("realign_polynomial: need d >= 1");
  const int r = V.r();
  const double guard = config.coef_norm_guard > 0.0
                           ? config.coef_norm_guard
                           : 1e3 * std::sqrt(static_cast<double>(r));
  CoefficientVector c = CoefficientVector::zero(r, d);
  const double step_scale =
      2.0 * config.eta_coef / static_cast<double>(config.B_realign);
  for (int t = 0; t < config.T_realign; ++t) {
    const SampleBatch batch = oracle.draw(config.B_realign);
    const Eigen::VectorXd grad = kernels::residual_feature_sum(
        c, V.columns(), batch.xs, batch.ys);
    c.values -= step_scale * grad;
    if (!(c.values.norm() <= guard))
      throw numerical_guard_error(
          "realign_polynomial: coefficient norm exceeded guard at step " +
          std::to_string(t) + " (eta_coef too large?)");
  }
  return c;
}

Frame subspace_descent(SamplingOracle& oracle, const Frame& V0,
                       const CoefficientVector& c, const BoostConfig& config) {
  config.validate();
  Frame v = V0;
  for (int t = 0; t < config.T_subspace; ++t) {
    const SampleBatch sample = oracle.draw(1);
    const GeodesicStep step = compute_geodesic_step(
        Parameters(c, v), sample.xs.col(0), sample.ys[0]);
    v = apply_geodesic(v, step, config.eta_vec);
    const double defect = v.orthonormality_defect();
    if (!(defect <= config.defect_guard))
      throw numerical_guard_error(
          "subspace_descent: orthonormality defect " + std::to_string(defect) +
          " at step " + std::to_string(t) + " (eta_vec too large?)");
  }
  return v;
}

Parameters geo_sgd(SamplingOracle& oracle, const Frame& V0, int d,
                   const BoostConfig& config, const RoundCallback& on_round) {
  config.validate();
  Frame v = V0;
  for (int t = 0; t < config.T_outer; ++t) {
    const CoefficientVector c = realign_polynomial(oracle, v, d, config);
    v = subspace_descent(oracle, v, c, config);
    if (on_round) on_round(t + 1, Parameters(c, v));
  }
  CoefficientVector c = realign_polynomial(oracle, v, d, config);
  Parameters result(std::move(c), std::move(v));
  if (on_round) on_round(config.T_outer + 1, result);
  return result;
}

}  // namespace lowrank
