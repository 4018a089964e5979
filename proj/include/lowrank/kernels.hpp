#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "lowrank/hermite.hpp"

namespace lowrank::kernels {

/// Sample-sweep kernels. Each has a serial reference implementation and an
/// OpenMP-parallel one; the unsuffixed entry dispatches on input size. The
/// parallel reductions accumulate fixed-size chunks and combine them in
/// chunk order, so results are independent of the thread count (they may
/// differ from the serial reference by summation-order roundoff only; see
/// the kernel tests for the tolerance).
///
/// Throughout, `xs` holds one sample per column (n x N).

/// Sum over selected samples of x x^T, where sample i is selected when
/// |y_i| > tau and max_j |<partial_j, x_i>| <= 1. Returns the number of
/// selected samples in `kept`.
Eigen::MatrixXd masked_second_moment_serial(const Eigen::MatrixXd& xs,
                                            const Eigen::VectorXd& ys,
                                            const Eigen::MatrixXd& partial,
                                            double tau, std::int64_t* kept);
Eigen::MatrixXd masked_second_moment_parallel(const Eigen::MatrixXd& xs,
                                              const Eigen::VectorXd& ys,
                                              const Eigen::MatrixXd& partial,
                                              double tau, std::int64_t* kept);
Eigen::MatrixXd masked_second_moment(const Eigen::MatrixXd& xs,
                                     const Eigen::VectorXd& ys,
                                     const Eigen::MatrixXd& partial,
                                     double tau, std::int64_t* kept);

/// Gaussian n x N matrix, column i drawn from derive_seed(seed, i). The
/// parallel variant is bit-identical to the serial one.
Eigen::MatrixXd gaussian_columns_serial(int n, std::int64_t count,
                                        std::uint64_t seed);
Eigen::MatrixXd gaussian_columns_parallel(int n, std::int64_t count,
                                          std::uint64_t seed);
Eigen::MatrixXd gaussian_columns(int n, std::int64_t count,
                                 std::uint64_t seed);

/// sum_i (p_c(V^T x_i) - y_i) * Phi(V^T x_i): the unnormalized coefficient
/// gradient of the squared loss over a batch.
Eigen::VectorXd residual_feature_sum_serial(const CoefficientVector& c,
                                            const Eigen::MatrixXd& V,
                                            const Eigen::MatrixXd& xs,
                                            const Eigen::VectorXd& ys);
Eigen::VectorXd residual_feature_sum_parallel(const CoefficientVector& c,
                                              const Eigen::MatrixXd& V,
                                              const Eigen::MatrixXd& xs,
                                              const Eigen::VectorXd& ys);
Eigen::VectorXd residual_feature_sum(const CoefficientVector& c,
                                     const Eigen::MatrixXd& V,
                                     const Eigen::MatrixXd& xs,
                                     const Eigen::VectorXd& ys);

/// sum_i (p_c(V^T x_i) - y_i)^2.
double squared_residual_sum_serial(const CoefficientVector& c,
                                   const Eigen::MatrixXd& V,
                                   const Eigen::MatrixXd& xs,
                                   const Eigen::VectorXd& ys);
double squared_residual_sum_parallel(const CoefficientVector& c,
                                     const Eigen::MatrixXd& V,
                                     const Eigen::MatrixXd& xs,
                                     const Eigen::VectorXd& ys);
double squared_residual_sum(const CoefficientVector& c,
                            const Eigen::MatrixXd& V,
                            const Eigen::MatrixXd& xs,
                            const Eigen::VectorXd& ys);

}  // namespace lowrank::kernels
