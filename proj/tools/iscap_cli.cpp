// SPDX-License-Identifier: Apache-2.0
//
// iscap: command-line driver for single runs, sweeps, the oracle suite and
// plot re-rendering. Failures print one line
//   error kind=<Kind> message="<text>"
// on stderr and exit with status 1.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iscap/algorithm.hpp"
#include "iscap/config_io.hpp"
#include "iscap/errors.hpp"
#include "iscap/harness.hpp"
#include "iscap/plot.hpp"
#include "iscap/run_record_io.hpp"
#include "verification.hpp"

namespace fs = std::filesystem;
using namespace iscap;

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

int fail(const std::string& kind, const std::string& message) {
  std::cerr << "error kind=" << kind << " message=\"" << escape(message) << "\"\n";
  return 1;
}

SystemConfig build_config(const std::string& path, const std::vector<std::string>& overrides) {
  SystemConfig cfg = path.empty() ? SystemConfig{} : load_config(path);
  for (const std::string& o : overrides) apply_override(cfg, o);
  return cfg;
}

void print_summary(const RunRecord& rec) {
  std::printf("mode          %s\n", to_string(rec.mode));
  std::printf("seed          %llu (rng_seed %llu)\n", static_cast<unsigned long long>(rec.seed),
              static_cast<unsigned long long>(rec.rng_seed));
  std::printf("converged     %s\n", rec.converged ? "yes" : "no");
  std::printf("mmf_rate      %.6g bit/s/Hz\n", rec.rates.mmf_rate);
  std::printf("crb           %.6g\n", rec.crb);
  std::printf("objective     %.6g (rates in nats)\n", rec.objective);
  std::printf("worst_slack   %.3e\n", rec.feasibility.worst());
  std::printf("iterations    outer %d, middle %d, inner %d (%d inner caps)\n", rec.outer_iterations,
              rec.middle_iterations, rec.inner_iterations, rec.inner_cap_hits);
  std::printf("time          %.3f s total, %.3g s per inner iteration\n", rec.times.total,
              rec.seconds_per_inner_iteration());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RSMA-assisted sensing, communication and powering beamformer"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::string mode_name = "rsma";
  std::string out;
  int jobs = 0;

  CLI::App* run_cmd = app.add_subcommand("run", "Optimise one seeded scenario and print a summary");
  run_cmd->add_option("--config", config_path, "JSON config file");
  run_cmd->add_option("--set", overrides, "key=value config override (repeatable)");
  run_cmd->add_option("--seed", seed, "scenario seed offset");
  run_cmd->add_option("--mode", mode_name, "rsma or sdma");
  run_cmd->add_option("--out", out, "write the full run record as JSON");

  std::string spec_path;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a Monte Carlo sweep from a spec file");
  sweep_cmd->add_option("spec", spec_path, "sweep spec (JSON)")->required();
  sweep_cmd->add_option("--jobs", jobs, "worker threads (overrides the spec)");
  sweep_cmd->add_option("--out", out, "output directory (overrides the spec)");
  sweep_cmd->add_option("--set", overrides, "key=value override of the spec's config (repeatable)");

  CLI::App* verify_cmd = app.add_subcommand("verify", "Run the oracle suite");

  std::string csv_path;
  std::string kind_name;
  CLI::App* plot_cmd = app.add_subcommand("plot", "Render SVG plots from an aggregate CSV");
  plot_cmd->add_option("csv", csv_path, "aggregate CSV written by sweep")->required();
  plot_cmd->add_option("--kind", kind_name, "objective_vs_axis, rate_and_crb_vs_axis or time_vs_axis (default: all)");
  plot_cmd->add_option("--out", out, "output file (one kind) or directory (all kinds)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what());
  }

  try {
    if (*run_cmd) {
      const SystemConfig cfg = build_config(config_path, overrides);
      const AccessMode mode = parse_mode(mode_name);
      const RunRecord rec = run(generate_scenario(cfg, seed), cfg, mode);
      print_summary(rec);
      if (!out.empty()) write_run_record(rec, out);
      return 0;
    }

    if (*sweep_cmd) {
      SweepSpec spec = load_sweep_spec(spec_path);
      for (const std::string& o : overrides) apply_override(spec.base, o);
      if (jobs > 0) spec.jobs = jobs;
      if (!out.empty()) spec.output_dir = out;
      validate(spec);
      fs::create_directories(spec.output_dir);
      const SweepResult result = run_sweep(spec);
      const fs::path dir(spec.output_dir);
      emit_csv(result, (dir / "aggregate.csv").string(), (dir / "detail.csv").string());
      for (PlotKind k : {PlotKind::objective_vs_axis, PlotKind::rate_and_crb_vs_axis, PlotKind::time_vs_axis})
        emit_plot(result, k, (dir / (std::string(to_string(k)) + ".svg")).string());
      for (const AggregateRow& a : result.aggregates)
        std::printf("%s=%-10.6g %s  runs %3d  failed %3d  converged %3d  mmf %.4f +- %.4f  crb %.4e +- %.2e\n",
                    to_string(result.axis), a.value, to_string(a.mode), a.n_runs, a.n_failed, a.n_converged,
                    a.mmf_rate.mean, a.mmf_rate.se, a.crb.mean, a.crb.se);
      std::printf("wrote %s\n", dir.string().c_str());
      return 0;
    }

    if (*verify_cmd) {
      bool all = true;
      for (const oracle::CheckResult& r : oracle::run_oracle_suite()) {
        std::printf("%s\n", oracle::format_check(r).c_str());
        all = all && r.pass;
      }
      return all ? 0 : fail("VerificationFailed", "one or more oracle checks failed");
    }

    if (*plot_cmd) {
      const SweepResult result = parse_aggregate_csv(csv_path);
      if (!kind_name.empty()) {
        const PlotKind k = parse_plot_kind(kind_name);
        const std::string path = out.empty() ? kind_name + ".svg" : out;
        emit_plot(result, k, path);
        std::printf("wrote %s\n", path.c_str());
        return 0;
      }
      const fs::path dir = out.empty() ? fs::path(csv_path).parent_path() : fs::path(out);
      if (!dir.empty()) fs::create_directories(dir);
      for (PlotKind k : {PlotKind::objective_vs_axis, PlotKind::rate_and_crb_vs_axis, PlotKind::time_vs_axis}) {
        const fs::path path = dir / (std::string(to_string(k)) + ".svg");
        emit_plot(result, k, path.string());
        std::printf("wrote %s\n", path.string().c_str());
      }
      return 0;
    }
  } catch (const Error& e) {
    return fail(e.kind(), e.what());
  } catch (const fs::filesystem_error& e) {
    return fail("IoError", e.what());
  } catch (const std::exception& e) {
    return fail("InternalError", e.what());
  }
  return 0;
}
