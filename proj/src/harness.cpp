#include "lowrank/harness.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <stdexcept>

#include "lowrank/errors.hpp"
#include "lowrank/parallel.hpp"
#include "lowrank/rng.hpp"
#include "lowrank/serialize.hpp"

namespace lowrank {

namespace {

constexpr std::int64_t kEvalSamples = 8192;

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ms(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               start)
      .count();
}

struct TrialOutput {
  std::vector<TraceRecord> records;
  bool failed = false;
  std::string error;
};

TrialOutput run_trial(const ExperimentConfig& config, int trial) {
  TrialOutput out;
  const std::uint64_t trial_seed = derive_seed(config.seed, 0x71A1u,
                                               static_cast<std::uint64_t>(trial));
  const Clock::time_point start = Clock::now();
  try {
    const Instance inst = random_instance(config.n, config.r, config.d,
                                          trial_seed, config.alpha_min);
    SamplingOracle oracle(inst, derive_seed(trial_seed, 0x0AC1Eu));
    const SampleBatch eval_batch =
        sample_batch(inst, kEvalSamples, derive_seed(trial_seed, 0xEA17u));

    const Frame warm = trimmed_pca(oracle, config.n, config.r, config.warm);

    TraceRecord warm_record;
    warm_record.trial = trial;
    warm_record.phase = Phase::warmstart;
    warm_record.round = 0;
    warm_record.procrustes = procrustes_distance(warm, inst.frame());
    warm_record.chordal = chordal_distance(warm, inst.frame());
    warm_record.samples_used = oracle.samples_drawn();
    warm_record.wall_ms = elapsed_ms(start);
    out.records.push_back(warm_record);

    if (config.boost.T_outer == 0) return out;

    const BoostConfig boost =
        config.boost.resolved_for(config.n, config.r, config.d, inst.alpha());
    const auto on_round = [&](int round, const Parameters& params) {
      TraceRecord rec;
      rec.trial = trial;
      rec.phase = Phase::boost_round;
      rec.round = round;
      rec.procrustes = procrustes_distance(params.frame, inst.frame());
      rec.chordal = chordal_distance(params.frame, inst.frame());
      rec.coef_error = aligned_coefficient_error(params, inst.truth());
      rec.pred_error = prediction_error(params, eval_batch, inst.y_variance());
      rec.samples_used = oracle.samples_drawn();
      rec.wall_ms = elapsed_ms(start);
      out.records.push_back(rec);
    };
    geo_sgd(oracle, warm, config.d, boost, on_round);
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 1 || r < 1 || d < 1)
    throw config_error("ExperimentConfig: dimensions must be positive");
  if (r > n) throw config_error("ExperimentConfig: need r <= n");
  if (trials < 1) throw config_error("ExperimentConfig: need trials >= 1");
  if (alpha_min <= 0.0 || alpha_min > 1.0)
    throw config_error("ExperimentConfig: alpha_min must be in (0, 1]");
  if (warm.samples_per_round < n)
    throw config_error("ExperimentConfig: warm.samples_per_round must be >= n");
}

const char* phase_name(Phase p) {
  return p == Phase::warmstart ? "warmstart" : "boost_round";
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<TrialOutput> outputs(static_cast<std::size_t>(config.trials));
#pragma omp parallel for schedule(dynamic) num_threads(max_threads())
  for (int trial = 0; trial < config.trials; ++trial)
    outputs[static_cast<std::size_t>(trial)] = run_trial(config, trial);

  ExperimentResult result;
  for (int trial = 0; trial < config.trials; ++trial) {
    auto& output = outputs[static_cast<std::size_t>(trial)];
    for (auto& rec : output.records) result.records.push_back(std::move(rec));
    if (output.failed) result.failures.emplace_back(trial, output.error);
  }
  // Trials already emit ordered records; the sort keeps the output
  // deterministic regardless of how the loop was scheduled.
  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const TraceRecord& a, const TraceRecord& b) {
                     if (a.trial != b.trial) return a.trial < b.trial;
                     if (a.phase != b.phase)
                       return a.phase == Phase::warmstart;
                     return a.round < b.round;
                   });
  return result;
}

void write_trace_csv(std::ostream& out,
                     const std::vector<TraceRecord>& records) {
  out << "trial,phase,round,procrustes,chordal,coef_error,pred_error,"
         "samples_used,wall_ms\n";
  for (const TraceRecord& rec : records) {
    out << rec.trial << ',' << phase_name(rec.phase) << ',' << rec.round << ','
        << format_double(rec.procrustes) << ',' << format_double(rec.chordal)
        << ',' << format_double(rec.coef_error) << ','
        << format_double(rec.pred_error) << ',' << rec.samples_used << ','
        << rec.wall_ms << '\n';
  }
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"n", c.n},
          {"r", c.r},
          {"d", c.d},
          {"alpha_min", c.alpha_min},
          {"seed", c.seed},
          {"warm", to_json(c.warm)},
          {"boost", to_json(c.boost)},
          {"trials", c.trials},
          {"output_path", c.output_path}};
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.n = j.at("n").get<int>();
    c.r = j.at("r").get<int>();
    c.d = j.at("d").get<int>();
    if (j.contains("alpha_min")) c.alpha_min = j.at("alpha_min").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("warm")) c.warm = trim_config_from_json(j.at("warm"));
    if (j.contains("boost")) c.boost = boost_config_from_json(j.at("boost"));
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    if (j.contains("output_path"))
      c.output_path = j.at("output_path").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("experiment config: ") + e.what());
  }
  return c;
}

}  // namespace lowrank
