// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "iscap/types.hpp"

namespace iscap {

/// Nonlinear rectifier constants of one energy receiver (all in SI units).
struct EhParams {
  double max_dc_power = 0.024;   // M, watts
  double steepness = 150.0;      // upsilon, 1/watt
  double turning_point = 0.014;  // varsigma, watts
};

/// Every scenario and algorithm parameter. Powers are in watts with the
/// information-receiver noise variance as the power reference.
struct SystemConfig {
  int n_tx = 4;
  int n_rx = 4;
  int n_users = 4;
  int n_ers = 2;

  double snr_db = 25.0;
  std::optional<double> power_budget;  // overrides snr_db when set

  double noise_comm = 1.0;
  double noise_sense = 1.0;
  double tradeoff = 0.1;

  std::vector<EhParams> eh_circuits{EhParams{}, EhParams{}};
  std::vector<double> eh_thresholds{0.006, 0.006};
  double er_channel_gain = 6.0e-3;

  double target_angle = 0.0;
  cplx reflection{1.0, 0.0};
  bool randomize_target = false;

  double tol_outer = 1e-3;
  double tol_middle = 1e-3;
  double tol_inner = 1e-3;
  double step_init = 0.1;
  double step_shrink = 0.9;
  double psd_margin = 1e-8;
  int max_outer = 50;
  int max_middle = 50;
  int max_inner = 5000;

  // Dual initialisation: beta starts at 1/K, every other multiplier here.
  double dual_init = 0.01;
  // Start each subproblem from the previous subproblem's multipliers instead
  // of the fixed initial values (the first subproblem always uses those).
  bool warm_start_duals = true;

  std::uint64_t rng_seed = 42;
};

/// Throws ConfigError when any invariant is violated.
void validate(const SystemConfig& cfg);

/// Resizes per-ER arrays whose entries are all equal to n_ers entries.
void normalize_er_arrays(SystemConfig& cfg);

/// P_t = 10^(snr_db/10) * noise_comm, unless power_budget is set explicitly.
double power_from_snr(const SystemConfig& cfg);

/// One channel realisation. Columns of ir_channels are h_k, columns of
/// er_channels are g_l.
struct Scenario {
  CMat ir_channels;  // n_tx x K
  CMat er_channels;  // n_tx x L
  double theta = 0.0;
  cplx alpha{1.0, 0.0};
  RVec noise_comm;  // per IR
  double noise_sense = 1.0;
  int n_rx = 1;
  std::uint64_t seed_offset = 0;  // as passed to generate_scenario

  int n_tx() const { return static_cast<int>(ir_channels.rows()); }
  int n_users() const { return static_cast<int>(ir_channels.cols()); }
  int n_ers() const { return static_cast<int>(er_channels.cols()); }
};

/// Draws i.i.d. unit-variance circularly-symmetric Gaussian channels. Pure
/// function of (cfg.rng_seed, seed_offset).
Scenario generate_scenario(const SystemConfig& cfg, std::uint64_t seed_offset);

}  // namespace iscap
