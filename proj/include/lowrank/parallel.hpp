#pragma once

#include <cstdint>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lowrank {

/// Worker cap: LOWRANK_THREADS when set and positive, else the OpenMP
/// default (1 without OpenMP).
inline int max_threads() {
  static const int cached = [] {
    if (const char* env = std::getenv("LOWRANK_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v > 0) return static_cast<int>(v);
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
  }();
  return cached;
}

/// Chunk size used by the deterministic reductions in kernels.cpp. Partial
/// sums are computed per chunk (possibly in parallel) and combined in chunk
/// order, so results do not depend on the number of threads.
inline constexpr std::int64_t kReductionChunk = 4096;

inline std::int64_t chunk_count(std::int64_t n) {
  return (n + kReductionChunk - 1) / kReductionChunk;
}

}  // namespace lowrank
