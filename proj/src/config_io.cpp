// SPDX-License-Identifier: Apache-2.0
#include "iscap/config_io.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "iscap/errors.hpp"

namespace iscap {

using nlohmann::json;

namespace {

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("key '" + key + "' expects a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError("key '" + key + "' expects an integer");
  return v.get<int>();
}

std::vector<double> as_per_er(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) throw ConfigError("key '" + key + "' expects a number or a nonempty array");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_number(e, key));
  return out;
}

// Per-ER circuit fields are stored inside EhParams; expand them onto the
// circuit vector, broadcasting a single value.
void set_circuit_field(SystemConfig& cfg, const std::vector<double>& values, double EhParams::*field) {
  if (values.size() > 1) {
    const EhParams fill = cfg.eh_circuits.empty() ? EhParams{} : cfg.eh_circuits.back();
    cfg.eh_circuits.resize(values.size(), fill);
    for (std::size_t l = 0; l < values.size(); ++l) cfg.eh_circuits[l].*field = values[l];
    return;
  }
  if (cfg.eh_circuits.empty()) cfg.eh_circuits.resize(1);
  for (auto& c : cfg.eh_circuits) c.*field = values.front();
}

using Setter = std::function<void(SystemConfig&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"n_tx", [](SystemConfig& c, const json& v, const std::string& k) { c.n_tx = as_int(v, k); }},
      {"n_rx", [](SystemConfig& c, const json& v, const std::string& k) { c.n_rx = as_int(v, k); }},
      {"n_users", [](SystemConfig& c, const json& v, const std::string& k) { c.n_users = as_int(v, k); }},
      {"n_ers", [](SystemConfig& c, const json& v, const std::string& k) { c.n_ers = as_int(v, k); }},
      {"snr_db", [](SystemConfig& c, const json& v, const std::string& k) { c.snr_db = as_number(v, k); }},
      {"power_budget",
       [](SystemConfig& c, const json& v, const std::string& k) {
         if (v.is_null())
           c.power_budget.reset();
         else
           c.power_budget = as_number(v, k);
       }},
      {"noise_comm", [](SystemConfig& c, const json& v, const std::string& k) { c.noise_comm = as_number(v, k); }},
      {"noise_sense", [](SystemConfig& c, const json& v, const std::string& k) { c.noise_sense = as_number(v, k); }},
      {"tradeoff", [](SystemConfig& c, const json& v, const std::string& k) { c.tradeoff = as_number(v, k); }},
      {"eh_threshold",
       [](SystemConfig& c, const json& v, const std::string& k) { c.eh_thresholds = as_per_er(v, k); }},
      {"eh_max_dc_power",
       [](SystemConfig& c, const json& v, const std::string& k) {
         set_circuit_field(c, as_per_er(v, k), &EhParams::max_dc_power);
       }},
      {"eh_steepness",
       [](SystemConfig& c, const json& v, const std::string& k) {
         set_circuit_field(c, as_per_er(v, k), &EhParams::steepness);
       }},
      {"eh_turning_point",
       [](SystemConfig& c, const json& v, const std::string& k) {
         set_circuit_field(c, as_per_er(v, k), &EhParams::turning_point);
       }},
      {"er_channel_gain",
       [](SystemConfig& c, const json& v, const std::string& k) { c.er_channel_gain = as_number(v, k); }},
      {"target_angle", [](SystemConfig& c, const json& v, const std::string& k) { c.target_angle = as_number(v, k); }},
      {"reflection_re",
       [](SystemConfig& c, const json& v, const std::string& k) { c.reflection.real(as_number(v, k)); }},
      {"reflection_im",
       [](SystemConfig& c, const json& v, const std::string& k) { c.reflection.imag(as_number(v, k)); }},
      {"randomize_target",
       [](SystemConfig& c, const json& v, const std::string& k) {
         if (!v.is_boolean()) throw ConfigError("key '" + k + "' expects a boolean");
         c.randomize_target = v.get<bool>();
       }},
      {"warm_start_duals",
       [](SystemConfig& c, const json& v, const std::string& k) {
         if (!v.is_boolean()) throw ConfigError("key '" + k + "' expects a boolean");
         c.warm_start_duals = v.get<bool>();
       }},
      {"tol_outer", [](SystemConfig& c, const json& v, const std::string& k) { c.tol_outer = as_number(v, k); }},
      {"tol_middle", [](SystemConfig& c, const json& v, const std::string& k) { c.tol_middle = as_number(v, k); }},
      {"tol_inner", [](SystemConfig& c, const json& v, const std::string& k) { c.tol_inner = as_number(v, k); }},
      {"step_init", [](SystemConfig& c, const json& v, const std::string& k) { c.step_init = as_number(v, k); }},
      {"step_shrink", [](SystemConfig& c, const json& v, const std::string& k) { c.step_shrink = as_number(v, k); }},
      {"psd_margin", [](SystemConfig& c, const json& v, const std::string& k) { c.psd_margin = as_number(v, k); }},
      {"max_outer", [](SystemConfig& c, const json& v, const std::string& k) { c.max_outer = as_int(v, k); }},
      {"max_middle", [](SystemConfig& c, const json& v, const std::string& k) { c.max_middle = as_int(v, k); }},
      {"max_inner", [](SystemConfig& c, const json& v, const std::string& k) { c.max_inner = as_int(v, k); }},
      {"dual_init", [](SystemConfig& c, const json& v, const std::string& k) { c.dual_init = as_number(v, k); }},
      {"rng_seed",
       [](SystemConfig& c, const json& v, const std::string& k) {
         if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
           throw ConfigError("key '" + k + "' expects a nonnegative integer");
         c.rng_seed = v.get<std::uint64_t>();
       }},
  };
  return table;
}

}  // namespace

SystemConfig config_from_json(const json& doc, SystemConfig base) {
  if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(base, value, key);
  }
  normalize_er_arrays(base);
  validate(base);
  return base;
}

json config_to_json(const SystemConfig& cfg) {
  json j;
  j["n_tx"] = cfg.n_tx;
  j["n_rx"] = cfg.n_rx;
  j["n_users"] = cfg.n_users;
  j["n_ers"] = cfg.n_ers;
  j["snr_db"] = cfg.snr_db;
  j["power_budget"] = cfg.power_budget ? json(*cfg.power_budget) : json(nullptr);
  j["noise_comm"] = cfg.noise_comm;
  j["noise_sense"] = cfg.noise_sense;
  j["tradeoff"] = cfg.tradeoff;
  json m = json::array(), u = json::array(), v = json::array();
  for (const auto& c : cfg.eh_circuits) {
    m.push_back(c.max_dc_power);
    u.push_back(c.steepness);
    v.push_back(c.turning_point);
  }
  j["eh_max_dc_power"] = m;
  j["eh_steepness"] = u;
  j["eh_turning_point"] = v;
  j["eh_threshold"] = cfg.eh_thresholds;
  j["er_channel_gain"] = cfg.er_channel_gain;
  j["target_angle"] = cfg.target_angle;
  j["reflection_re"] = cfg.reflection.real();
  j["reflection_im"] = cfg.reflection.imag();
  j["randomize_target"] = cfg.randomize_target;
  j["tol_outer"] = cfg.tol_outer;
  j["tol_middle"] = cfg.tol_middle;
  j["tol_inner"] = cfg.tol_inner;
  j["step_init"] = cfg.step_init;
  j["step_shrink"] = cfg.step_shrink;
  j["psd_margin"] = cfg.psd_margin;
  j["max_outer"] = cfg.max_outer;
  j["max_middle"] = cfg.max_middle;
  j["max_inner"] = cfg.max_inner;
  j["dual_init"] = cfg.dual_init;
  j["warm_start_duals"] = cfg.warm_start_duals;
  j["rng_seed"] = cfg.rng_seed;
  return j;
}

SystemConfig load_config(const std::string& path, SystemConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return config_from_json(doc, std::move(base));
}

void apply_override(SystemConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) throw ConfigError("override must look like key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  cfg = config_from_json(json{{key, value}}, cfg);
}

}  // namespace iscap
