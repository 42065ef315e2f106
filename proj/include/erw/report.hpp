#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "erw/analysis.hpp"
#include "erw/experiment.hpp"
#include "erw/oracle.hpp"

namespace erw {

using Json = nlohmann::ordered_json;

/// Parses the "model" object of a config document. ConfigError on unknown
/// keys, missing fields or invalid values.
ModelConfig model_from_json(const Json& j);
Json model_to_json(const ModelConfig& model);

/// Parses the "experiment" object on top of `model`.
ExperimentPlan plan_from_json(const Json& j, const ModelConfig& model);

Json to_json(const RegimeReport& report);
Json to_json(const ConditionReport& report);
Json to_json(const MomentSummary& m);
Json to_json(const StabilityTable& t);
Json to_json(const ExperimentResult& result);
Json to_json(const ExactPmf& row);

enum class OutputFormat { Summary, Checkpoints, Samples };

/// Writes summary.json, checkpoints.jsonl and samples.csv (as requested)
/// into `dir`, creating it if needed. Returns the paths written.
std::vector<std::filesystem::path> write_experiment(const ExperimentResult& result, const std::filesystem::path& dir,
                                                    const std::vector<OutputFormat>& formats);

}  // namespace erw
