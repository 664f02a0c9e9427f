// SPDX-License-Identifier: Apache-2.0
#include "iscap/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "iscap/algorithm.hpp"
#include "iscap/config_io.hpp"
#include "iscap/errors.hpp"
#include "iscap/run_record_io.hpp"

namespace iscap {

using nlohmann::json;

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::n_tx: return "n_tx";
    case SweepAxis::n_users: return "n_users";
    case SweepAxis::snr_db: return "snr_db";
    case SweepAxis::eh_threshold: return "eh_threshold";
  }
  return "n_tx";
}

SweepAxis parse_axis(const std::string& name) {
  for (SweepAxis a : {SweepAxis::n_tx, SweepAxis::n_users, SweepAxis::snr_db, SweepAxis::eh_threshold})
    if (name == to_string(a)) return a;
  throw ConfigError("unknown sweep axis '" + name + "'");
}

AccessMode parse_mode(const std::string& name) {
  if (name == "rsma" || name == "RSMA") return AccessMode::rsma;
  if (name == "sdma" || name == "SDMA") return AccessMode::sdma;
  throw ConfigError("unknown access mode '" + name + "'");
}

void validate(const SweepSpec& spec) {
  if (spec.values.empty()) throw ConfigError("sweep values must be nonempty");
  for (std::size_t i = 1; i < spec.values.size(); ++i)
    if (!(spec.values[i] > spec.values[i - 1])) throw ConfigError("sweep values must be strictly increasing");
  if (spec.n_seeds < 1) throw ConfigError("n_seeds must be at least 1");
  if (spec.jobs < 1) throw ConfigError("jobs must be at least 1");
  for (double v : spec.values) (void)config_for(spec, v);
}

SweepSpec sweep_spec_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("sweep spec must be a JSON object");
  SweepSpec spec;
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "axis") {
        spec.axis = parse_axis(v.get<std::string>());
      } else if (key == "values") {
        spec.values = v.get<std::vector<double>>();
      } else if (key == "config") {
        spec.base = config_from_json(v);
      } else if (key == "n_seeds") {
        spec.n_seeds = v.get<int>();
      } else if (key == "modes") {
        spec.modes.clear();
        for (const auto& m : v) spec.modes.push_back(parse_mode(m.get<std::string>()));
      } else if (key == "output_dir") {
        spec.output_dir = v.get<std::string>();
      } else if (key == "seed_base") {
        spec.seed_base = v.get<std::uint64_t>();
      } else if (key == "jobs") {
        spec.jobs = v.get<int>();
      } else {
        throw ConfigError("unknown sweep key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep spec: ") + e.what());
  }
  if (!doc.contains("axis")) throw ConfigError("sweep spec needs an 'axis'");
  validate(spec);
  return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sweep spec '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("sweep spec '" + path + "': " + e.what());
  }
  return sweep_spec_from_json(doc);
}

SystemConfig config_for(const SweepSpec& spec, double value) {
  SystemConfig cfg = spec.base;
  auto as_count = [value](const char* what) {
    if (value != std::round(value) || value < 1) throw ConfigError(std::string(what) + " values must be positive integers");
    return static_cast<int>(value);
  };
  switch (spec.axis) {
    case SweepAxis::n_tx: cfg.n_tx = as_count("n_tx"); break;
    case SweepAxis::n_users: cfg.n_users = as_count("n_users"); break;
    case SweepAxis::snr_db:
      cfg.snr_db = value;
      cfg.power_budget.reset();
      break;
    case SweepAxis::eh_threshold: std::fill(cfg.eh_thresholds.begin(), cfg.eh_thresholds.end(), value); break;
  }
  normalize_er_arrays(cfg);
  validate(cfg);
  return cfg;
}

Stat mean_se(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return s;
}

namespace {

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

SeedRow run_cell(const SweepSpec& spec, double value, std::uint64_t seed, AccessMode mode) {
  SeedRow row;
  row.value = value;
  row.seed = seed;
  row.mode = mode;
  try {
    const SystemConfig cfg = config_for(spec, value);
    const Scenario s = generate_scenario(cfg, seed);
    const RunRecord rec = run(s, cfg, mode);
    row.ok = true;
    row.tolerance_reached = rec.tolerance_reached;
    row.converged = rec.converged;
    row.objective = rec.objective;
    row.mmf_rate = rec.rates.mmf_rate;
    row.crb = rec.crb;
    row.worst_slack = rec.feasibility.worst();
    row.outer_iterations = rec.outer_iterations;
    row.middle_iterations = rec.middle_iterations;
    row.inner_iterations = rec.inner_iterations;
    row.inner_cap_hits = rec.inner_cap_hits;
    row.time_total = rec.times.total;
    row.time_inner = rec.times.inner;
    row.time_per_inner = rec.seconds_per_inner_iteration();
  } catch (const Error& e) {
    row.error = e.kind();
  } catch (const std::exception&) {
    row.error = "InternalError";
  }
  return row;
}

std::string bool_text(bool b) { return b ? "1" : "0"; }

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<SeedRow>& rows, const std::vector<double>& values,
                                    const std::vector<AccessMode>& modes) {
  std::vector<AggregateRow> out;
  for (double v : values) {
    for (AccessMode m : modes) {
      AggregateRow a;
      a.value = v;
      a.mode = m;
      std::vector<double> obj, mmf, crb, total, per_inner;
      for (const SeedRow& r : rows) {
        if (r.value != v || r.mode != m) continue;
        if (!r.ok) {
          ++a.n_failed;
          continue;
        }
        ++a.n_runs;
        if (r.converged) ++a.n_converged;
        obj.push_back(r.objective);
        mmf.push_back(r.mmf_rate);
        crb.push_back(r.crb);
        total.push_back(r.time_total);
        per_inner.push_back(r.time_per_inner);
      }
      a.objective = mean_se(obj);
      a.mmf_rate = mean_se(mmf);
      a.crb = mean_se(crb);
      a.time_total = mean_se(total);
      a.time_per_inner = mean_se(per_inner);
      a.time_per_inner_median = median(per_inner);
      out.push_back(a);
    }
  }
  return out;
}

SweepResult run_sweep(const SweepSpec& spec) {
  validate(spec);
  struct Cell {
    double value;
    std::uint64_t seed;
    AccessMode mode;
  };
  std::vector<Cell> cells;
  for (double v : spec.values)
    for (int i = 0; i < spec.n_seeds; ++i)
      for (AccessMode m : spec.modes) cells.push_back({v, spec.seed_base + static_cast<std::uint64_t>(i), m});

  // Each worker writes only its own slots, so the output order is fixed by
  // the cell list and not by completion order.
  std::vector<SeedRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++)
      rows[i] = run_cell(spec, cells[i].value, cells[i].seed, cells[i].mode);
  };
  const int n_threads = std::max(1, std::min<int>(spec.jobs, static_cast<int>(cells.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  SweepResult result;
  result.axis = spec.axis;
  result.aggregates = aggregate(rows, spec.values, spec.modes);
  result.rows = std::move(rows);
  return result;
}

namespace {

const char* const kAggregateColumns[] = {
    "mode",          "n_runs",          "n_failed",       "n_converged",          "objective_mean",
    "objective_se",  "mmf_rate_mean",   "mmf_rate_se",    "crb_mean",             "crb_se",
    "time_total_mean", "time_total_se", "time_per_inner_mean", "time_per_inner_se", "time_per_inner_median"};

const char* const kDetailColumns[] = {
    "mode",           "seed",           "status",           "tolerance_reached", "converged",         "objective",
    "mmf_rate",       "crb",            "worst_slack",      "outer_iterations",  "middle_iterations",
    "inner_iterations", "inner_cap_hits", "time_total",     "time_inner",        "time_per_inner"};

template <std::size_t N>
std::string header(SweepAxis axis, const char* const (&cols)[N]) {
  std::string h = to_string(axis);
  for (const char* c : cols) {
    h += ',';
    h += c;
  }
  return h + '\n';
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw ConfigError("malformed number '" + s + "' in CSV");
  return v;
}

}  // namespace

std::string aggregate_csv(const SweepResult& result) {
  std::string out = header(result.axis, kAggregateColumns);
  for (const AggregateRow& a : result.aggregates) {
    const double nums[] = {a.objective.mean,  a.objective.se,      a.mmf_rate.mean,      a.mmf_rate.se,
                           a.crb.mean,        a.crb.se,            a.time_total.mean,    a.time_total.se,
                           a.time_per_inner.mean, a.time_per_inner.se, a.time_per_inner_median};
    out += format_number(a.value) + ',' + to_string(a.mode) + ',' + std::to_string(a.n_runs) + ',' +
           std::to_string(a.n_failed) + ',' + std::to_string(a.n_converged);
    for (double x : nums) out += ',' + format_number(x);
    out += '\n';
  }
  return out;
}

std::string detail_csv(const SweepResult& result) {
  std::string out = header(result.axis, kDetailColumns);
  for (const SeedRow& r : result.rows) {
    out += format_number(r.value) + ',' + to_string(r.mode) + ',' + std::to_string(r.seed) + ',' +
           (r.ok ? std::string("ok") : r.error) + ',' + bool_text(r.tolerance_reached) + ',' +
           bool_text(r.converged);
    for (double x : {r.objective, r.mmf_rate, r.crb, r.worst_slack}) out += ',' + format_number(x);
    for (int n : {r.outer_iterations, r.middle_iterations, r.inner_iterations, r.inner_cap_hits})
      out += ',' + std::to_string(n);
    for (double x : {r.time_total, r.time_inner, r.time_per_inner}) out += ',' + format_number(x);
    out += '\n';
  }
  return out;
}

void emit_csv(const SweepResult& result, const std::string& aggregate_path, const std::string& detail_path) {
  write_file(aggregate_path, aggregate_csv(result));
  if (!detail_path.empty()) write_file(detail_path, detail_csv(result));
}

SweepResult parse_aggregate_csv_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty aggregate CSV");
  const std::vector<std::string> head = split(line);
  constexpr std::size_t n_cols = std::size(kAggregateColumns) + 1;
  if (head.size() != n_cols) throw ConfigError("aggregate CSV header has the wrong column count");
  for (std::size_t i = 1; i < n_cols; ++i)
    if (head[i] != kAggregateColumns[i - 1]) throw ConfigError("unexpected aggregate CSV column '" + head[i] + "'");
  SweepResult result;
  result.axis = parse_axis(head[0]);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> c = split(line);
    if (c.size() != n_cols) throw ConfigError("aggregate CSV row has the wrong column count");
    AggregateRow a;
    a.value = parse_double(c[0]);
    a.mode = parse_mode(c[1]);
    a.n_runs = static_cast<int>(parse_double(c[2]));
    a.n_failed = static_cast<int>(parse_double(c[3]));
    a.n_converged = static_cast<int>(parse_double(c[4]));
    Stat* stats[] = {&a.objective, &a.mmf_rate, &a.crb, &a.time_total, &a.time_per_inner};
    for (std::size_t k = 0; k < std::size(stats); ++k) {
      stats[k]->mean = parse_double(c[5 + 2 * k]);
      stats[k]->se = parse_double(c[6 + 2 * k]);
    }
    a.time_per_inner_median = parse_double(c[15]);
    result.aggregates.push_back(a);
  }
  return result;
}

SweepResult parse_aggregate_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_aggregate_csv_text(buf.str());
}

}  // namespace iscap
