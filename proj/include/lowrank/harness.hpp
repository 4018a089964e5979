#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lowrank/geosgd.hpp"
#include "lowrank/model.hpp"
#include "lowrank/trimmed_pca.hpp"

namespace lowrank {

struct ExperimentConfig {
  int n = 0;
  int r = 0;
  int d = 0;
  double alpha_min = 0.3;
  std::uint64_t seed = 0;
  TrimConfig warm;
  BoostConfig boost;
  int trials = 1;
  std::string output_path;

  void validate() const;
};

enum class Phase { warmstart, boost_round };

const char* phase_name(Phase p);

/// One evaluation point of a trial. coef_error is aligned to the truth
/// rotation closest to the iterate and is -1 when no coefficients exist yet
/// (the warm-start record, which also carries pred_error = -1).
struct TraceRecord {
  int trial = 0;
  Phase phase = Phase::warmstart;
  int round = 0;
  double procrustes = 0.0;
  double chordal = 0.0;
  double coef_error = -1.0;
  double pred_error = -1.0;
  std::int64_t samples_used = 0;
  std::int64_t wall_ms = 0;
};

struct ExperimentResult {
  std::vector<TraceRecord> records;
  // (trial, error message) for trials that aborted; the sweep continues.
  std::vector<std::pair<int, std::string>> failures;
};

/// Full pipeline per trial: random_instance -> trimmed_pca -> geo_sgd, with
/// a record after the warm start and after each boost round. Deterministic
/// per (seed, trial); trials may run in parallel, records come out sorted.
/// When boost.T_outer == 0 the boost phase is skipped entirely and each
/// trial contributes exactly one warm-start record.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// CSV with header trial,phase,round,procrustes,chordal,coef_error,
/// pred_error,samples_used,wall_ms.
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& records);

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

/// CLI entry point (subcommands generate / warmstart / boost / run / eval).
/// Returns 0 on success, 1 on configuration errors, 2 on numerical-guard
/// aborts.
int cli_main(int argc, const char* const* argv);

}  // namespace lowrank
