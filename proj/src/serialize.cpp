#include "lowrank/serialize.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

nlohmann::json to_json(const CoefficientVector& c) {
  return {{"r", c.r}, {"d", c.d}, {"values", to_std(c.values)}};
}

CoefficientVector coefficient_vector_from_json(const nlohmann::json& j) {
  const auto values = j.at("values").get<std::vector<double>>();
  Eigen::VectorXd v =
      Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
  return CoefficientVector(j.at("r").get<int>(), j.at("d").get<int>(),
                           std::move(v));
}

nlohmann::json to_json(const Frame& f) {
  std::vector<std::vector<double>> columns;
  columns.reserve(static_cast<std::size_t>(f.r()));
  for (int j = 0; j < f.r(); ++j) columns.push_back(to_std(f.columns().col(j)));
  return {{"n", f.n()}, {"r", f.r()}, {"columns", columns}};
}

Frame frame_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const int r = j.at("r").get<int>();
  const auto columns = j.at("columns").get<std::vector<std::vector<double>>>();
  if (static_cast<int>(columns.size()) != r)
    throw config_error("frame: column count does not match r");
  Eigen::MatrixXd m(n, r);
  for (int col = 0; col < r; ++col) {
    if (static_cast<int>(columns[static_cast<std::size_t>(col)].size()) != n)
      throw config_error("frame: column length does not match n");
    for (int row = 0; row < n; ++row)
      m(row, col) = columns[static_cast<std::size_t>(col)]
                           [static_cast<std::size_t>(row)];
  }
  return Frame(std::move(m));
}

nlohmann::json to_json(const Parameters& p) {
  return {{"coef", to_json(p.coef)}, {"frame", to_json(p.frame)}};
}

Parameters parameters_from_json(const nlohmann::json& j) {
  return Parameters(coefficient_vector_from_json(j.at("coef")),
                    frame_from_json(j.at("frame")));
}

nlohmann::json to_json(const Instance& inst) {
  return {{"coef", to_json(inst.coef())},
          {"frame", to_json(inst.frame())},
          {"alpha", inst.alpha()},
          {"y_variance", inst.y_variance()}};
}

Instance instance_from_json(const nlohmann::json& j) {
  return Instance(Parameters(coefficient_vector_from_json(j.at("coef")),
                             frame_from_json(j.at("frame"))),
                  j.at("alpha").get<double>(),
                  j.at("y_variance").get<double>());
}

namespace {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

nlohmann::json to_json(const TrimConfig& c) {
  return {{"tau", c.tau},
          {"quantile", c.quantile},
          {"samples_per_round", c.samples_per_round},
          {"eig_tol", c.eig_tol},
          {"eig_max_iter", c.eig_max_iter},
          {"eigenvalue_floor", c.eigenvalue_floor},
          {"quantile_grid_search", c.quantile_grid_search}};
}

TrimConfig trim_config_from_json(const nlohmann::json& j) {
  TrimConfig c;
  read_field(j, "tau", c.tau);
  read_field(j, "quantile", c.quantile);
  read_field(j, "samples_per_round", c.samples_per_round);
  read_field(j, "eig_tol", c.eig_tol);
  read_field(j, "eig_max_iter", c.eig_max_iter);
  read_field(j, "eigenvalue_floor", c.eigenvalue_floor);
  read_field(j, "quantile_grid_search", c.quantile_grid_search);
  return c;
}

nlohmann::json to_json(const BoostConfig& c) {
  return {{"eta_coef", c.eta_coef},
          {"eta_vec", c.eta_vec},
          {"T_outer", c.T_outer},
          {"T_realign", c.T_realign},
          {"B_realign", c.B_realign},
          {"T_subspace", c.T_subspace},
          {"target_eps", c.target_eps},
          {"coef_norm_guard", c.coef_norm_guard},
          {"defect_guard", c.defect_guard},
          {"seed", c.seed}};
}

BoostConfig boost_config_from_json(const nlohmann::json& j) {
  BoostConfig c;
  read_field(j, "eta_coef", c.eta_coef);
  read_field(j, "eta_vec", c.eta_vec);
  read_field(j, "T_outer", c.T_outer);
  read_field(j, "T_realign", c.T_realign);
  read_field(j, "B_realign", c.B_realign);
  read_field(j, "T_subspace", c.T_subspace);
  read_field(j, "target_eps", c.target_eps);
  read_field(j, "coef_norm_guard", c.coef_norm_guard);
  read_field(j, "defect_guard", c.defect_guard);
  read_field(j, "seed", c.seed);
  return c;
}

void save_batch(const SampleBatch& batch, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("save_batch: cannot open " + path);
  const std::int64_t n_samples = batch.size();
  const std::int64_t dim = batch.xs.rows();
  out.write(reinterpret_cast<const char*>(&n_samples), sizeof(n_samples));
  out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
  // xs is stored with one sample per column (column-major), so the raw
  // buffer is already sample-major: exactly the row-major N x n layout.
  out.write(reinterpret_cast<const char*>(batch.xs.data()),
            static_cast<std::streamsize>(sizeof(double)) * n_samples * dim);
  out.write(reinterpret_cast<const char*>(batch.ys.data()),
            static_cast<std::streamsize>(sizeof(double)) * n_samples);
  if (!out) throw config_error("save_batch: write failed for " + path);
}

SampleBatch load_batch(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("load_batch: cannot open " + path);
  std::int64_t n_samples = 0;
  std::int64_t dim = 0;
  in.read(reinterpret_cast<char*>(&n_samples), sizeof(n_samples));
  in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
  if (!in || n_samples < 1 || dim < 1)
    throw config_error("load_batch: malformed header in " + path);
  SampleBatch batch;
  batch.xs.resize(dim, n_samples);
  batch.ys.resize(n_samples);
  in.read(reinterpret_cast<char*>(batch.xs.data()),
          static_cast<std::streamsize>(sizeof(double)) * n_samples * dim);
  in.read(reinterpret_cast<char*>(batch.ys.data()),
          static_cast<std::streamsize>(sizeof(double)) * n_samples);
  if (!in) throw config_error("load_batch: truncated file " + path);
  return batch;
}

void save_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("save_json: cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw config_error("save_json: write failed for " + path);
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("load_json: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("load_json: " + path + ": " + e.what());
  }
  return j;
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace lowrank
