// SPDX-License-Identifier: Apache-2.0
#include "iscap/run_record_io.hpp"

#include <cstdio>
#include <fstream>

#include "iscap/errors.hpp"

namespace iscap {

using nlohmann::json;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

json vec(const RVec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json cmat(const CMat& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    json c = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return {{"re", re}, {"im", im}};
}

json feasibility(const FeasibilityReport& f) {
  return {{"common_rate_slack", f.common_rate_slack},
          {"alloc_slack", f.alloc_slack},
          {"power_slack", f.power_slack},
          {"eh_slack", vec(f.eh_slack)},
          {"worst", f.worst()}};
}

}  // namespace

json run_record_to_json(const RunRecord& rec) {
  json middle = json::array();
  for (const MiddleTraceRow& m : rec.middle_trace)
    middle.push_back({{"outer", m.outer},
                      {"middle", m.middle},
                      {"inner_iterations", m.inner_iterations},
                      {"inner_hit_cap", m.inner_hit_cap},
                      {"objective", m.objective}});
  const RateReport& r = rec.rates;
  return {
      {"mode", to_string(rec.mode)},
      {"seed", rec.seed},
      {"rng_seed", rec.rng_seed},
      {"tolerance_reached", rec.tolerance_reached},
      {"converged", rec.converged},
      {"objective", rec.objective},
      {"crb", rec.crb},
      {"outer_trace", rec.outer_trace},
      {"middle_trace", middle},
      {"iterations",
       {{"outer", rec.outer_iterations},
        {"middle", rec.middle_iterations},
        {"inner", rec.inner_iterations},
        {"inner_cap_hits", rec.inner_cap_hits},
        {"middle_cap_hits", rec.middle_cap_hits}}},
      {"rates",
       {{"sinr_common", vec(r.sinr_common)},
        {"sinr_private", vec(r.sinr_private)},
        {"rate_common_bits", vec(r.rate_common)},
        {"rate_private_bits", vec(r.rate_private)},
        {"common_capacity_bits", r.common_capacity},
        {"per_user_total_bits", vec(r.per_user_total)},
        {"mmf_rate_bits", r.mmf_rate}}},
      {"state",
       {{"precoders", cmat(rec.state.precoders)},
        {"common_alloc_nats", vec(rec.state.common_alloc)},
        {"mmf_aux_nats", rec.state.mmf_aux}}},
      {"feasibility", feasibility(rec.feasibility)},
      {"initial_feasibility", feasibility(rec.initial_feasibility)},
      {"times",
       {{"setup", rec.times.setup},
        {"aux", rec.times.aux},
        {"surrogate", rec.times.surrogate},
        {"inner", rec.times.inner},
        {"total", rec.times.total},
        {"per_inner_iteration", rec.seconds_per_inner_iteration()}}},
  };
}

void write_run_record(const RunRecord& rec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << run_record_to_json(rec).dump(2) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string run_summary_csv_header() {
  return "mode,seed,converged,objective,mmf_rate,crb,worst_slack,outer_iterations,middle_iterations,"
         "inner_iterations,inner_cap_hits,time_total,time_inner,time_per_inner_iteration";
}

std::string run_summary_csv_row(const RunRecord& rec) {
  std::string row = to_string(rec.mode);
  auto add = [&row](const std::string& v) {
    row += ',';
    row += v;
  };
  add(std::to_string(rec.seed));
  add(rec.converged ? "1" : "0");
  add(format_number(rec.objective));
  add(format_number(rec.rates.mmf_rate));
  add(format_number(rec.crb));
  add(format_number(rec.feasibility.worst()));
  add(std::to_string(rec.outer_iterations));
  add(std::to_string(rec.middle_iterations));
  add(std::to_string(rec.inner_iterations));
  add(std::to_string(rec.inner_cap_hits));
  add(format_number(rec.times.total));
  add(format_number(rec.times.inner));
  add(format_number(rec.seconds_per_inner_iteration()));
  return row;
}

}  // namespace iscap
