#include "lowrank/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lowrank/parallel.hpp"
#include "lowrank/rng.hpp"

namespace lowrank::kernels {

namespace {

// Parallel dispatch threshold: below this, thread startup dominates.
constexpr std::int64_t kParallelCutoff = 8192;

bool sample_selected(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys,
                     const Eigen::MatrixXd& partial, double tau,
                     Eigen::Index i) {
  if (std::abs(ys[i]) <= tau) return false;
  for (Eigen::Index j = 0; j < partial.cols(); ++j) {
    if (std::abs(partial.col(j).dot(xs.col(i))) > 1.0) return false;
  }
  return true;
}

void accumulate_outer(Eigen::MatrixXd& acc, const Eigen::VectorXd& x) {
  acc.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0);
}

void mirror_lower(Eigen::MatrixXd& m) {
  m.triangularView<Eigen::StrictlyUpper>() =
      m.transpose().triangularView<Eigen::StrictlyUpper>();
}

}  // namespace

Eigen::MatrixXd masked_second_moment_serial(const Eigen::MatrixXd& xs,
                                            const Eigen::VectorXd& ys,
                                            const Eigen::MatrixXd& partial,
                                            double tau, std::int64_t* kept) {
  const Eigen::Index n = xs.rows();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  std::int64_t count = 0;
  for (Eigen::Index i = 0; i < xs.cols(); ++i) {
    if (!sample_selected(xs, ys, partial, tau, i)) continue;
    accumulate_outer(acc, xs.col(i));
    ++count;
  }
  mirror_lower(acc);
  if (kept) *kept = count;
  return acc;
}

Eigen::MatrixXd masked_second_moment_parallel(const Eigen::MatrixXd& xs,
                                              const Eigen::VectorXd& ys,
                                              const Eigen::MatrixXd& partial,
                                              double tau, std::int64_t* kept) {
  const Eigen::Index n = xs.rows();
  const std::int64_t chunks = chunk_count(xs.cols());
  std::vector<Eigen::MatrixXd> partials(
      static_cast<std::size_t>(chunks), Eigen::MatrixXd::Zero(n, n));
  std::vector<std::int64_t> counts(static_cast<std::size_t>(chunks), 0);
#pragma omp parallel for schedule(dynamic) num_threads(max_threads())
  for (std::int64_t chunk = 0; chunk < chunks; ++chunk) {
    const Eigen::Index begin = chunk * kReductionChunk;
    const Eigen::Index end =
        std::min<Eigen::Index>(begin + kReductionChunk, xs.cols());
    auto& acc = partials[static_cast<std::size_t>(chunk)];
    for (Eigen::Index i = begin; i < end; ++i) {
      if (!sample_selected(xs, ys, partial, tau, i)) continue;
      accumulate_outer(acc, xs.col(i));
      ++counts[static_cast<std::size_t>(chunk)];
    }
  }
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  std::int64_t count = 0;
  for (std::int64_t chunk = 0; chunk < chunks; ++chunk) {
    acc += partials[static_cast<std::size_t>(chunk)];
    count += counts[static_cast<std::size_t>(chunk)];
  }
  mirror_lower(acc);
  if (kept) *kept = count;
  return acc;
}

Eigen::MatrixXd masked_second_moment(const Eigen::MatrixXd& xs,
                                     const Eigen::VectorXd& ys,
                                     const Eigen::MatrixXd& partial,
                                     double tau, std::int64_t* kept) {
  if (xs.cols() < kParallelCutoff || max_threads() == 1)
    return masked_second_moment_serial(xs, ys, partial, tau, kept);
  return masked_second_moment_parallel(xs, ys, partial, tau, kept);
}

namespace {

void fill_gaussian_column(Eigen::MatrixXd& m, Eigen::Index col,
                          std::uint64_t seed) {
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(col)));
  for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, col) = rng.gaussian();
}

}  // namespace

Eigen::MatrixXd gaussian_columns_serial(int n, std::int64_t count,
                                        std::uint64_t seed) {
  Eigen::MatrixXd m(n, count);
  for (std::int64_t i = 0; i < count; ++i) fill_gaussian_column(m, i, seed);
  return m;
}

Eigen::MatrixXd gaussian_columns_parallel(int n, std::int64_t count,
                                          std::uint64_t seed) {
  Eigen::MatrixXd m(n, count);
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (std::int64_t i = 0; i < count; ++i) fill_gaussian_column(m, i, seed);
  return m;
}

Eigen::MatrixXd gaussian_columns(int n, std::int64_t count,
                                 std::uint64_t seed) {
  if (count < kParallelCutoff || max_threads() == 1)
    return gaussian_columns_serial(n, count, seed);
  return gaussian_columns_parallel(n, count, seed);
}

namespace {

struct ResidualScratch {
  const Basis* basis;
  Basis::Workspace ws;
  Eigen::VectorXd z;

  explicit ResidualScratch(const CoefficientVector& c)
      : basis(&Basis::get(c.r, c.d)), ws(basis->make_workspace()), z(c.r) {}

  // Fills ws.phi with Phi(V^T x) and returns the residual p_c(V^T x) - y.
  double residual(const CoefficientVector& c, const Eigen::MatrixXd& V,
                  const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys,
                  Eigen::Index i) {
    z.noalias() = V.transpose() * xs.col(i);
    basis->features(z, ws);
    return ws.phi.dot(c.values) - ys[i];
  }
};

void check_residual_inputs(const CoefficientVector& c, const Eigen::MatrixXd& V,
                           const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys) {
  if (V.cols() != c.r || V.rows() != xs.rows() || xs.cols() != ys.size())
    throw std::invalid_argument("residual kernel: shape mismatch");
}

}  // namespace

Eigen::VectorXd residual_feature_sum_serial(const CoefficientVector& c,
                                            const Eigen::MatrixXd& V,
                                            const Eigen::MatrixXd& xs,
                                            const Eigen::VectorXd& ys) {
  check_residual_inputs(c, V, xs, ys);
  ResidualScratch scratch(c);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(c.values.size());
  for (Eigen::Index i = 0; i < xs.cols(); ++i) {
    const double res = scratch.residual(c, V, xs, ys, i);
    sum += res * scratch.ws.phi;
  }
  return sum;
}

Eigen::VectorXd residual_feature_sum_parallel(const CoefficientVector& c,
                                              const Eigen::MatrixXd& V,
                                              const Eigen::MatrixXd& xs,
                                              const Eigen::VectorXd& ys) {
  check_residual_inputs(c, V, xs, ys);
  const std::int64_t chunks = chunk_count(xs.cols());
  std::vector<Eigen::VectorXd> partials(
      static_cast<std::size_t>(chunks),
      Eigen::VectorXd::Zero(c.values.size()));
#pragma omp parallel num_threads(max_threads())
  {
    ResidualScratch scratch(c);
#pragma omp for schedule(dynamic)
    for (std::int64_t chunk = 0; chunk < chunks; ++chunk) {
      const Eigen::Index begin = chunk * kReductionChunk;
      const Eigen::Index end =
          std::min<Eigen::Index>(begin + kReductionChunk, xs.cols());
      auto& acc = partials[static_cast<std::size_t>(chunk)];
      for (Eigen::Index i = begin; i < end; ++i) {
        const double res = scratch.residual(c, V, xs, ys, i);
        acc += res * scratch.ws.phi;
      }
    }
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(c.values.size());
  for (const auto& part : partials) sum += part;
  return sum;
}

Eigen::VectorXd residual_feature_sum(const CoefficientVector& c,
                                     const Eigen::MatrixXd& V,
                                     const Eigen::MatrixXd& xs,
                                     const Eigen::VectorXd& ys) {
  if (xs.cols() < kParallelCutoff || max_threads() == 1)
    return residual_feature_sum_serial(c, V, xs, ys);
  return residual_feature_sum_parallel(c, V, xs, ys);
}

double squared_residual_sum_serial(const CoefficientVector& c,
                                   const Eigen::MatrixXd& V,
                                   const Eigen::MatrixXd& xs,
                                   const Eigen::VectorXd& ys) {
  check_residual_inputs(c, V, xs, ys);
  ResidualScratch scratch(c);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < xs.cols(); ++i) {
    const double res = scratch.residual(c, V, xs, ys, i);
    sum += res * res;
  }
  return sum;
}

double squared_residual_sum_parallel(const CoefficientVector& c,
                                     const Eigen::MatrixXd& V,
                                     const Eigen::MatrixXd& xs,
                                     const Eigen::VectorXd& ys) {
  check_residual_inputs(c, V, xs, ys);
  const std::int64_t chunks = chunk_count(xs.cols());
  std::vector<double> partials(static_cast<std::size_t>(chunks), 0.0);
#pragma omp parallel num_threads(max_threads())
  {
    ResidualScratch scratch(c);
#pragma omp for schedule(dynamic)
    for (std::int64_t chunk = 0; chunk < chunks; ++chunk) {
      const Eigen::Index begin = chunk * kReductionChunk;
      const Eigen::Index end =
          std::min<Eigen::Index>(begin + kReductionChunk, xs.cols());
      double acc = 0.0;
      for (Eigen::Index i = begin; i < end; ++i) {
        const double res = scratch.residual(c, V, xs, ys, i);
        acc += res * res;
      }
      partials[static_cast<std::size_t>(chunk)] = acc;
    }
  }
  double sum = 0.0;
  for (double part : partials) sum += part;
  return sum;
}

double squared_residual_sum(const CoefficientVector& c,
                            const Eigen::MatrixXd& V,
                            const Eigen::MatrixXd& xs,
                            const Eigen::VectorXd& ys) {
  if (xs.cols() < kParallelCutoff || max_threads() == 1)
    return squared_residual_sum_serial(c, V, xs, ys);
  return squared_residual_sum_parallel(c, V, xs, ys);
}

}  // namespace lowrank::kernels
