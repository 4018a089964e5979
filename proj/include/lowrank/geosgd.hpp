#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>

#include "lowrank/model.hpp"

namespace lowrank {

/// Boosting-phase hyperparameters. Fields <= 0 are resolved by
/// `resolved_for` to structural defaults in terms of (n, r, d) and the
/// instance's certified non-degeneracy when known.
struct BoostConfig {
  double eta_coef = 0.0;    // default 0.05 / (d r^2)
  double eta_vec = 0.0;     // default alpha_hat / (T_subspace * n * 16)
  int T_outer = 1;
  int T_realign = 0;        // default ceil(200 ln(1/target_eps))
  int B_realign = 64;
  int T_subspace = 0;       // default 4n
  double target_eps = 1e-4;
  double coef_norm_guard = 0.0;  // default 1e3 sqrt(r)
  double defect_guard = 1e-6;
  std::uint64_t seed = 0;   // seeds the oracle in the CLI path

  BoostConfig resolved_for(int n, int r, int d, double alpha_hat) const;
  void validate() const;
};

/// The rank-one geodesic velocity at (Theta, x): h in the orthogonal
/// complement of span(V), nabla the link-polynomial gradient, and the
/// unit factors of the SVD h nabla^T = sigma h_hat nabla_hat^T. The unit
/// vectors are defined only when sigma > 0 (`has_direction`).
struct GeodesicStep {
  Eigen::VectorXd h;
  Eigen::VectorXd nabla;
  double sigma = 0.0;
  Eigen::VectorXd h_hat;
  Eigen::VectorXd nabla_hat;
  bool has_direction = false;
};

/// h = 2 (F_x(Theta) - y) Pi_V^perp x, nabla = grad p(V^T x).
GeodesicStep compute_geodesic_step(const Parameters& theta,
                                   const Eigen::VectorXd& x, double y);

/// Walks the Grassmannian geodesic with initial velocity -h nabla^T for
/// time eta_vec:
///   V' = V + (cos(sigma eta) - 1) (V nabla_hat) nabla_hat^T
///          - sin(sigma eta) h_hat nabla_hat^T.
/// Returns V unchanged when sigma = 0. The output satisfies the Frame
/// invariants without corrective QR.
Frame apply_geodesic(const Frame& V, const GeodesicStep& step, double eta_vec);

/// Mini-batch gradient descent on the coefficients of a degree-d hypothesis
/// for a fixed frame, started from zero, with fresh samples each step.
/// Aborts with a numerical_guard_error if the iterate norm exceeds the
/// guard.
CoefficientVector realign_polynomial(SamplingOracle& oracle, const Frame& V,
                                     int d, const BoostConfig& config);

/// T_subspace single-sample geodesic steps at fixed coefficients. Steps are
/// single-sample by design: the geodesic closed form is exact only for
/// rank-one velocity.
Frame subspace_descent(SamplingOracle& oracle, const Frame& V0,
                       const CoefficientVector& c, const BoostConfig& config);

/// Called after each outer round (1-based) and once more after the trailing
/// realign (round T_outer + 1) with the current hypothesis.
using RoundCallback = std::function<void(int round, const Parameters&)>;

/// T_outer rounds of { realign, subspace descent }, then one final realign.
Parameters geo_sgd(SamplingOracle& oracle, const Frame& V0, int d,
                   const BoostConfig& config,
                   const RoundCallback& on_round = {});

}  // namespace lowrank
