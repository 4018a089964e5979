#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "lowrank/geosgd.hpp"
#include "lowrank/model.hpp"
#include "lowrank/trimmed_pca.hpp"

namespace lowrank {

// JSON formats. Coefficients: {"r", "d", "values"} in canonical multi-index
// order. Frames: {"n", "r", "columns"} as a list of columns. Instances add
// {"alpha", "y_variance"}.
nlohmann::json to_json(const CoefficientVector& c);
CoefficientVector coefficient_vector_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Frame& f);
Frame frame_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Parameters& p);
Parameters parameters_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TrimConfig& c);
TrimConfig trim_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BoostConfig& c);
BoostConfig boost_config_from_json(const nlohmann::json& j);

/// Flat binary batch file: header (N, n as 64-bit little-endian integers),
/// then row-major float64 xs (N rows of n coordinates) followed by ys.
void save_batch(const SampleBatch& batch, const std::string& path);
SampleBatch load_batch(const std::string& path);

void save_json(const nlohmann::json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);

/// Formats a double with full round-trip precision (%.17g).
std::string format_double(double value);

}  // namespace lowrank
