// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "iscap/scenario.hpp"
#include "iscap/types.hpp"

namespace iscap {

enum class SweepAxis { n_tx, n_users, snr_db, eh_threshold };

const char* to_string(SweepAxis axis);
SweepAxis parse_axis(const std::string& name);
AccessMode parse_mode(const std::string& name);

/// A Monte Carlo sweep. `values` use the units of the matching config key
/// (eh_threshold in watts, applied to every ER).
struct SweepSpec {
  SweepAxis axis = SweepAxis::n_tx;
  std::vector<double> values;
  SystemConfig base;
  int n_seeds = 100;
  std::vector<AccessMode> modes{AccessMode::rsma, AccessMode::sdma};
  std::string output_dir = ".";
  std::uint64_t seed_base = 0;
  int jobs = 1;
};

/// Throws ConfigError on empty or non-increasing values, n_seeds < 1 or
/// jobs < 1.
void validate(const SweepSpec& spec);

/// Keys: axis, values, config (partial SystemConfig), n_seeds, modes,
/// output_dir, seed_base, jobs. Unknown keys are a ConfigError.
SweepSpec sweep_spec_from_json(const nlohmann::json& doc);
SweepSpec load_sweep_spec(const std::string& path);

/// The base config with the axis value applied.
SystemConfig config_for(const SweepSpec& spec, double value);

/// One (value, seed, mode) cell.
struct SeedRow {
  double value = 0.0;
  AccessMode mode = AccessMode::rsma;
  std::uint64_t seed = 0;  // scenario offset, seed_base + index
  bool ok = false;
  std::string error;  // error kind when !ok
  bool tolerance_reached = false;
  bool converged = false;
  double objective = 0.0;
  double mmf_rate = 0.0;  // bits/s/Hz
  double crb = 0.0;
  double worst_slack = 0.0;
  int outer_iterations = 0;
  int middle_iterations = 0;
  int inner_iterations = 0;
  int inner_cap_hits = 0;
  double time_total = 0.0;
  double time_inner = 0.0;
  double time_per_inner = 0.0;
};

struct Stat {
  double mean = 0.0;
  double se = 0.0;  // sample standard deviation / sqrt(n); 0 when n < 2
};

/// Mean and standard error over `xs`.
Stat mean_se(const std::vector<double>& xs);

/// Statistics over the successful runs of one (value, mode) pair.
struct AggregateRow {
  double value = 0.0;
  AccessMode mode = AccessMode::rsma;
  int n_runs = 0;
  int n_failed = 0;
  int n_converged = 0;
  Stat objective;
  Stat mmf_rate;
  Stat crb;
  Stat time_total;
  Stat time_per_inner;
  double time_per_inner_median = 0.0;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::n_tx;
  std::vector<AggregateRow> aggregates;  // ordered by (value, mode)
  std::vector<SeedRow> rows;             // ordered by (value, seed, mode)
};

/// Runs every cell on `spec.jobs` threads. Failed runs are recorded in their
/// row and never abort the sweep. The result does not depend on jobs.
SweepResult run_sweep(const SweepSpec& spec);

/// Deterministic reduction of per-seed rows, in the order of `values` and
/// `modes`.
std::vector<AggregateRow> aggregate(const std::vector<SeedRow>& rows, const std::vector<double>& values,
                                    const std::vector<AccessMode>& modes);

/// Writes the aggregate table and, when `detail_path` is nonempty, the
/// per-seed rows. Columns whose names contain "time" hold wall-clock values.
void emit_csv(const SweepResult& result, const std::string& aggregate_path, const std::string& detail_path = {});

std::string aggregate_csv(const SweepResult& result);
std::string detail_csv(const SweepResult& result);

/// Reads a file written by emit_csv back into aggregates (rows stay empty).
SweepResult parse_aggregate_csv(const std::string& path);
SweepResult parse_aggregate_csv_text(const std::string& text);

}  // namespace iscap
