#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "gmq/bounds.hpp"
#include "gmq/calibrate.hpp"
#include "gmq/distribution.hpp"
#include "gmq/problems.hpp"
#include "gmq/simulator.hpp"

namespace gmq {

inline constexpr int kSchemaVersion = 1;

// Shortest decimal that round-trips to the same double ("inf"/"nan" spelled
// out); integers print without a trailing ".0".
std::string format_double(double v);

nlohmann::json to_json(const ProblemInstance& instance);
ProblemInstance instance_from_json(const nlohmann::json& j); // re-validates invariants

nlohmann::json to_json(const ObjectiveDistribution& dist);
ObjectiveDistribution distribution_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CircuitParams& params);
CircuitParams circuit_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RegressionModel& model);
RegressionModel model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const OptimizationResult& result);

nlohmann::json to_json(const WitnessReport& report);

std::string orientation_name(Orientation o);
Orientation orientation_from_name(const std::string& name);

void save_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path); // checks schema version

std::string distribution_csv(const ObjectiveDistribution& dist); // value,count rows
std::string metrics_csv_row(const std::string& instance_id, int p, const StateMetrics& m);
std::string bound_csv_row(const std::string& instance_id, const BoundReport& report);

inline constexpr const char* kMetricsCsvHeader = "instance_id,p,lambda,alpha,expectation,tts";
inline constexpr const char* kBoundCsvHeader = "instance_id,p,basis_ub,lambda_ub,alpha_ub";

} // namespace gmq
