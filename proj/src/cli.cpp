#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "lowrank/errors.hpp"
#include "lowrank/harness.hpp"
#include "lowrank/rng.hpp"
#include "lowrank/serialize.hpp"

namespace lowrank {

namespace {

Instance load_instance(const std::string& path) {
  return instance_from_json(load_json(path));
}

void add_boost_options(CLI::App* cmd, BoostConfig& boost,
                       std::string& config_path) {
  cmd->add_option("--config", config_path, "boost config JSON file");
  cmd->add_option("--eta-coef", boost.eta_coef, "coefficient learning rate");
  cmd->add_option("--eta-vec", boost.eta_vec, "geodesic learning rate");
  cmd->add_option("--rounds", boost.T_outer, "outer rounds");
  cmd->add_option("--t-realign", boost.T_realign, "realign steps per round");
  cmd->add_option("--b-realign", boost.B_realign, "realign batch size");
  cmd->add_option("--t-subspace", boost.T_subspace,
                  "geodesic steps per round");
  cmd->add_option("--eps", boost.target_eps, "target accuracy");
  cmd->add_option("--seed", boost.seed, "oracle seed");
}

int run_generate(int n, int r, int d, std::uint64_t seed, std::int64_t N,
                 double alpha_min, const std::string& out_instance,
                 const std::string& out_batch) {
  const Instance inst = random_instance(n, r, d, seed, alpha_min);
  save_json(to_json(inst), out_instance);
  if (N > 0) {
    const SampleBatch batch =
        sample_batch(inst, N, derive_seed(seed, 0xBA7C4u));
    save_batch(batch, out_batch);
  }
  std::cout << "instance " << out_instance << " alpha "
            << format_double(inst.alpha()) << " y_variance "
            << format_double(inst.y_variance()) << "\n";
  return 0;
}

int run_warmstart(const std::string& instance_path, TrimConfig warm,
                  std::uint64_t seed, const std::string& out_path) {
  const Instance inst = load_instance(instance_path);
  SamplingOracle oracle(inst, seed);
  const Frame frame = trimmed_pca(oracle, inst.n(), inst.r(), warm);
  if (!out_path.empty()) save_json(to_json(frame), out_path);
  std::cout << "procrustes "
            << format_double(procrustes_distance(frame, inst.frame()))
            << " samples " << oracle.samples_drawn() << "\n";
  return 0;
}

int run_boost(const std::string& instance_path, const std::string& frame_path,
              BoostConfig boost, const std::string& config_path,
              const std::string& out_path) {
  if (!config_path.empty()) {
    // Explicit flags take precedence over the file.
    BoostConfig from_file = boost_config_from_json(load_json(config_path));
    const BoostConfig defaults;
    if (boost.eta_coef == defaults.eta_coef) boost.eta_coef = from_file.eta_coef;
    if (boost.eta_vec == defaults.eta_vec) boost.eta_vec = from_file.eta_vec;
    if (boost.T_outer == defaults.T_outer) boost.T_outer = from_file.T_outer;
    if (boost.T_realign == defaults.T_realign)
      boost.T_realign = from_file.T_realign;
    if (boost.B_realign == defaults.B_realign)
      boost.B_realign = from_file.B_realign;
    if (boost.T_subspace == defaults.T_subspace)
      boost.T_subspace = from_file.T_subspace;
    if (boost.target_eps == defaults.target_eps)
      boost.target_eps = from_file.target_eps;
    if (boost.seed == defaults.seed) boost.seed = from_file.seed;
  }
  const Instance inst = load_instance(instance_path);
  const Frame start = frame_from_json(load_json(frame_path));
  if (start.n() != inst.n() || start.r() != inst.r())
    throw config_error("boost: frame shape does not match instance");
  SamplingOracle oracle(inst, boost.seed);
  const BoostConfig resolved =
      boost.resolved_for(inst.n(), inst.r(), inst.d(), inst.alpha());
  const Parameters result = geo_sgd(oracle, start, inst.d(), resolved);
  if (!out_path.empty()) save_json(to_json(result), out_path);
  const SampleBatch eval_batch =
      sample_batch(inst, 8192, derive_seed(boost.seed, 0xEA17u));
  std::cout << "procrustes "
            << format_double(procrustes_distance(result.frame, inst.frame()))
            << " coef_error "
            << format_double(aligned_coefficient_error(result, inst.truth()))
            << " pred_error "
            << format_double(
                   prediction_error(result, eval_batch, inst.y_variance()))
            << " samples " << oracle.samples_drawn() << "\n";
  return 0;
}

int run_run(const std::string& config_path, std::string out_path) {
  ExperimentConfig config =
      experiment_config_from_json(load_json(config_path));
  if (!out_path.empty()) config.output_path = out_path;
  if (config.output_path.empty())
    throw config_error("run: no output path (flag --out or config output_path)");
  const ExperimentResult result = run_experiment(config);
  std::ofstream out(config.output_path);
  if (!out) throw config_error("run: cannot open " + config.output_path);
  write_trace_csv(out, result.records);
  for (const auto& [trial, message] : result.failures)
    std::cerr << "trial " << trial << " failed: " << message << "\n";
  std::cout << "wrote " << result.records.size() << " records to "
            << config.output_path << "\n";
  if (!result.failures.empty() &&
      static_cast<int>(result.failures.size()) == config.trials)
    throw numerical_guard_error("run: every trial aborted");
  return 0;
}

int run_eval(const std::string& params_path, const std::string& batch_path,
             const std::string& instance_path) {
  const Parameters params = parameters_from_json(load_json(params_path));
  const SampleBatch batch = load_batch(batch_path);
  double y_variance;
  if (!instance_path.empty()) {
    y_variance = load_instance(instance_path).y_variance();
  } else {
    const double mean = batch.ys.mean();
    y_variance =
        (batch.ys.array() - mean).square().sum() / batch.ys.size();
    if (y_variance <= 0.0)
      throw config_error("eval: batch has zero response variance");
  }
  std::cout << format_double(prediction_error(params, batch, y_variance))
            << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Low-rank polynomial learning: trimmed-PCA warm start plus "
               "geodesic SGD boosting"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand(
      "generate", "write a random instance and a sample batch");
  int g_n = 0, g_r = 0, g_d = 0;
  std::int64_t g_N = 0;
  std::uint64_t g_seed = 0;
  double g_alpha_min = 0.3;
  std::string g_out_instance = "instance.json";
  std::string g_out_batch = "batch.bin";
  generate->add_option("--n", g_n, "ambient dimension")->required();
  generate->add_option("--r", g_r, "subspace dimension")->required();
  generate->add_option("--d", g_d, "polynomial degree")->required();
  generate->add_option("--seed", g_seed, "seed")->required();
  generate->add_option("--N", g_N, "batch size (0: instance only)");
  generate->add_option("--alpha-min", g_alpha_min, "non-degeneracy floor");
  generate->add_option("--out-instance", g_out_instance, "instance path");
  generate->add_option("--out-batch", g_out_batch, "batch path");

  // warmstart
  auto* warmstart =
      app.add_subcommand("warmstart", "run the trimmed-PCA warm start");
  std::string w_instance;
  std::string w_out;
  std::uint64_t w_seed = 0;
  TrimConfig w_config;
  warmstart->add_option("--instance", w_instance, "instance JSON (oracle)")
      ->required();
  warmstart->add_option("--N", w_config.samples_per_round,
                        "samples per round")->required();
  warmstart->add_option("--seed", w_seed, "oracle seed");
  warmstart->add_option("--tau", w_config.tau, "threshold (0: calibrate)");
  warmstart->add_option("--quantile", w_config.quantile,
                        "calibration quantile");
  warmstart->add_flag("--grid-search", w_config.quantile_grid_search,
                      "grid-search the quantile");
  warmstart->add_option("--eig-floor", w_config.eigenvalue_floor,
                        "eigenvalue floor");
  warmstart->add_option("--out", w_out, "output frame JSON");

  // boost
  auto* boost_cmd =
      app.add_subcommand("boost", "run geodesic SGD from a frame");
  std::string b_instance, b_frame, b_config, b_out;
  BoostConfig b_boost;
  boost_cmd->add_option("--instance", b_instance, "instance JSON (oracle)")
      ->required();
  boost_cmd->add_option("--frame", b_frame, "warm-start frame JSON")
      ->required();
  boost_cmd->add_option("--out", b_out, "output parameters JSON");
  add_boost_options(boost_cmd, b_boost, b_config);

  // run
  auto* run_cmd =
      app.add_subcommand("run", "full pipeline from an experiment config");
  std::string r_config, r_out;
  run_cmd->add_option("--config", r_config, "experiment config JSON")
      ->required();
  run_cmd->add_option("--out", r_out, "trace CSV path");

  // eval
  auto* eval_cmd = app.add_subcommand(
      "eval", "prediction error of a parameters file on a batch");
  std::string e_params, e_batch, e_instance;
  eval_cmd->add_option("--params", e_params, "parameters JSON")->required();
  eval_cmd->add_option("--batch", e_batch, "batch file")->required();
  eval_cmd->add_option("--instance", e_instance,
                       "instance JSON for the exact response variance");

  try {
    app.parse(argc, argv);
    if (generate->parsed())
      return run_generate(g_n, g_r, g_d, g_seed, g_N, g_alpha_min,
                          g_out_instance, g_out_batch);
    if (warmstart->parsed())
      return run_warmstart(w_instance, w_config, w_seed, w_out);
    if (boost_cmd->parsed())
      return run_boost(b_instance, b_frame, b_boost, b_config, b_out);
    if (run_cmd->parsed()) return run_run(r_config, r_out);
    if (eval_cmd->parsed()) return run_eval(e_params, e_batch, e_instance);
    return 1;
  } catch (const CLI::ParseError& e) {
    // Normalize CLI11's code range to the documented contract: 0 for help,
    // 1 for any parse/usage failure.
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const numerical_guard_error& e) {
    std::cerr << "numerical guard: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace lowrank
