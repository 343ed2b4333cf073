#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fedlab/simulator.hpp"

namespace fedlab::cli {

/// Strict JSON -> FederationConfig. Unknown keys anywhere are hard errors;
/// missing required keys (defense.kind, attack.kind) are reported by path.
sim::FederationConfig parse_config(const nlohmann::json& j);

/// Fully-resolved config back to JSON (the echo written next to results).
nlohmann::json config_to_json(const sim::FederationConfig& cfg);

/// Fills derived fields: model dims from the data shape, auto scale factor
/// (N/K for model replacement), default edge-cluster center, attack-spec
/// round bookkeeping. Then validates.
void resolve_config(sim::FederationConfig& cfg);

/// Applies one "dotted.path=value" override onto the raw JSON tree. The value
/// is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// A "<lo>..<hi> step <s>" sweep expansion; empty when the value is scalar.
std::vector<double> parse_sweep_values(const std::string& value);

}  // namespace fedlab::cli
