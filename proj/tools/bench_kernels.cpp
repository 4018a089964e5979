// Times the serial reference kernels against their OpenMP counterparts on
// experiment-sized inputs. Run with LOWRANK_THREADS=k to cap the workers.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "lowrank/kernels.hpp"
#include "lowrank/model.hpp"
#include "lowrank/parallel.hpp"
#include "lowrank/rng.hpp"
#include "lowrank/subspace.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warmup
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(reps));
  for (int i = 0; i < reps; ++i) {
    const auto start = Clock::now();
    fn();
    times.push_back(
        std::chrono::duration<double, std::milli>(Clock::now() - start)
            .count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
  using namespace lowrank;

  const int n = 64;
  const std::int64_t N = 200000;
  const int r = 2;
  const int d = 3;
  const std::uint64_t seed = 20240701;

  const Instance inst = random_instance(n, r, d, seed, 0.2);
  const SampleBatch batch = sample_batch(inst, N, derive_seed(seed, 1));
  const Eigen::MatrixXd no_partial(n, 0);
  const double tau = 1.0;
  const CoefficientVector c = inst.coef();
  const Eigen::MatrixXd V = random_frame(n, r, derive_seed(seed, 2)).columns();

  std::printf("threads: %d, N = %lld, n = %d, r = %d, d = %d\n", max_threads(),
              static_cast<long long>(N), n, r, d);
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel",
              "speedup");

  std::int64_t kept = 0;
  report("masked_second_moment",
         time_ms([&] { kernels::masked_second_moment_serial(
                     batch.xs, batch.ys, no_partial, tau, &kept); }, 5),
         time_ms([&] { kernels::masked_second_moment_parallel(
                     batch.xs, batch.ys, no_partial, tau, &kept); }, 5));

  report("gaussian_columns",
         time_ms([&] { kernels::gaussian_columns_serial(n, N, seed); }, 5),
         time_ms([&] { kernels::gaussian_columns_parallel(n, N, seed); }, 5));

  report("residual_feature_sum",
         time_ms([&] { kernels::residual_feature_sum_serial(c, V, batch.xs,
                                                            batch.ys); }, 5),
         time_ms([&] { kernels::residual_feature_sum_parallel(c, V, batch.xs,
                                                              batch.ys); }, 5));

  report("squared_residual_sum",
         time_ms([&] { kernels::squared_residual_sum_serial(c, V, batch.xs,
                                                            batch.ys); }, 5),
         time_ms([&] { kernels::squared_residual_sum_parallel(c, V, batch.xs,
                                                              batch.ys); }, 5));
  return 0;
}
