// SPDX-License-Identifier: Apache-2.0
#include "iscap/scenario.hpp"

#include <cmath>
#include <algorithm>
#include <random>
#include <string>

#include "iscap/errors.hpp"

namespace iscap {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void normalize_er_arrays(SystemConfig& cfg) {
  const auto n = static_cast<std::size_t>(std::max(cfg.n_ers, 0));
  // Uniform arrays follow n_ers; heterogeneous ones must match it exactly.
  auto uniform = [](const auto& v, auto eq) {
    for (const auto& e : v)
      if (!eq(e, v.front())) return false;
    return true;
  };
  const bool circuits_uniform = !cfg.eh_circuits.empty() &&
      uniform(cfg.eh_circuits, [](const EhParams& a, const EhParams& b) {
        return a.max_dc_power == b.max_dc_power && a.steepness == b.steepness && a.turning_point == b.turning_point;
      });
  const bool thresholds_uniform =
      !cfg.eh_thresholds.empty() && uniform(cfg.eh_thresholds, [](double a, double b) { return a == b; });
  if (circuits_uniform) cfg.eh_circuits.resize(n, cfg.eh_circuits.front());
  if (thresholds_uniform) cfg.eh_thresholds.resize(n, cfg.eh_thresholds.front());
  if (n == 0) {
    cfg.eh_circuits.clear();
    cfg.eh_thresholds.clear();
  }
}

void validate(const SystemConfig& cfg) {
  require(cfg.n_tx >= 1, "n_tx must be >= 1");
  require(cfg.n_rx >= 1, "n_rx must be >= 1");
  require(cfg.n_users >= 1, "n_users must be >= 1");
  require(cfg.n_ers >= 0, "n_ers must be >= 0");
  require(std::isfinite(cfg.snr_db), "snr_db must be finite");
  require(!cfg.power_budget || *cfg.power_budget > 0.0, "power_budget must be > 0");
  require(cfg.noise_comm > 0.0, "noise_comm must be > 0");
  require(cfg.noise_sense > 0.0, "noise_sense must be > 0");
  require(cfg.tradeoff >= 0.0, "tradeoff must be >= 0");
  require(cfg.er_channel_gain >= 0.0, "er_channel_gain must be >= 0");
  require(std::abs(cfg.reflection) > 0.0, "reflection coefficient must be nonzero");
  require(cfg.tol_outer > 0.0 && cfg.tol_middle > 0.0 && cfg.tol_inner > 0.0,
          "tolerances must be > 0");
  require(cfg.step_init > 0.0, "step_init must be > 0");
  require(cfg.step_shrink > 0.0 && cfg.step_shrink < 1.0, "step_shrink must lie in (0,1)");
  require(cfg.psd_margin >= 0.0, "psd_margin must be >= 0");
  require(cfg.max_outer >= 1 && cfg.max_middle >= 1 && cfg.max_inner >= 1,
          "iteration caps must be >= 1");
  require(cfg.dual_init >= 0.0, "dual_init must be >= 0");

  const auto n = static_cast<std::size_t>(cfg.n_ers);
  require(cfg.eh_circuits.size() == n, "eh circuit arrays must have n_ers entries");
  require(cfg.eh_thresholds.size() == n, "eh_threshold must have n_ers entries");
  for (std::size_t l = 0; l < n; ++l) {
    const EhParams& c = cfg.eh_circuits[l];
    const std::string tag = "ER " + std::to_string(l) + ": ";
    require(c.max_dc_power > 0.0, tag + "eh_max_dc_power must be > 0");
    require(c.steepness > 0.0, tag + "eh_steepness must be > 0");
    require(c.turning_point > 0.0, tag + "eh_turning_point must be > 0");
    const double e = cfg.eh_thresholds[l];
    require(e >= 0.0, tag + "eh_threshold must be >= 0");
    const double ex = std::exp(c.steepness * c.turning_point);
    const double x = ex / (1.0 + ex);
    const double y = c.max_dc_power / ex;
    require((e + y) * x < c.max_dc_power, tag + "eh_threshold is above the reachable output");
  }
}

double power_from_snr(const SystemConfig& cfg) {
  if (cfg.power_budget) return *cfg.power_budget;
  return std::pow(10.0, cfg.snr_db / 10.0) * cfg.noise_comm;
}

Scenario generate_scenario(const SystemConfig& cfg, std::uint64_t seed_offset) {
  validate(cfg);
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.rng_seed), static_cast<std::uint32_t>(cfg.rng_seed >> 32),
                    static_cast<std::uint32_t>(seed_offset), static_cast<std::uint32_t>(seed_offset >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  auto draw = [&] {
    const double re = half(rng);
    const double im = half(rng);
    return cplx(re, im);
  };

  Scenario s;
  s.ir_channels.resize(cfg.n_tx, cfg.n_users);
  for (int k = 0; k < cfg.n_users; ++k)
    for (int i = 0; i < cfg.n_tx; ++i) s.ir_channels(i, k) = draw();
  s.er_channels.resize(cfg.n_tx, cfg.n_ers);
  for (int l = 0; l < cfg.n_ers; ++l)
    for (int i = 0; i < cfg.n_tx; ++i) s.er_channels(i, l) = cfg.er_channel_gain * draw();

  s.theta = cfg.target_angle;
  s.alpha = cfg.reflection;
  if (cfg.randomize_target) {
    std::uniform_real_distribution<double> angle(-kPi / 3.0, kPi / 3.0);
    s.theta = angle(rng);
  }
  s.noise_comm = RVec::Constant(cfg.n_users, cfg.noise_comm);
  s.noise_sense = cfg.noise_sense;
  s.n_rx = cfg.n_rx;
  s.seed_offset = seed_offset;
  return s;
}

}  // namespace iscap
