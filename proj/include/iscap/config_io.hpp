// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "iscap/scenario.hpp"

namespace iscap {

// Config files are flat JSON objects. Per-ER keys (eh_threshold,
// eh_max_dc_power, eh_steepness, eh_turning_point) accept a number, which is
// broadcast to every ER, or an array with one entry per ER.

/// Applies the keys present in `doc` on top of `base`. Unknown keys are a
/// ConfigError so typos do not silently fall back to defaults.
SystemConfig config_from_json(const nlohmann::json& doc, SystemConfig base = {});
nlohmann::json config_to_json(const SystemConfig& cfg);
SystemConfig load_config(const std::string& path, SystemConfig base = {});

/// Parses "key=value" where value is JSON (bare words are taken as strings).
void apply_override(SystemConfig& cfg, std::string_view assignment);

}  // namespace iscap
