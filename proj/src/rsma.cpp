// SPDX-License-Identifier: Apache-2.0
#include "iscap/rsma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "iscap/energy.hpp"
#include "iscap/errors.hpp"
#include "iscap/sensing.hpp"

namespace iscap {

PrecoderState PrecoderState::zeros(int n_tx, int n_users) {
  PrecoderState p;
  p.precoders = CMat::Zero(n_tx, n_users + 1);
  p.common_alloc = RVec::Zero(n_users);
  return p;
}

RateReport compute_sinrs(const CMat& precoders, const Scenario& s) {
  const int k_users = s.n_users();
  if (precoders.rows() != s.n_tx() || precoders.cols() != k_users + 1)
    throw DimensionMismatch("precoder matrix must be n_tx x (K+1)");

  // gains(k, j) = |h_k^H p_j|^2, column 0 is the common stream.
  const RMat gains = (s.ir_channels.adjoint() * precoders).cwiseAbs2();

  RateReport r;
  r.sinr_common.resize(k_users);
  r.sinr_private.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    const double private_sum = gains.row(k).tail(k_users).sum();
    const double noise = s.noise_comm(k);
    r.sinr_common(k) = gains(k, 0) / (private_sum + noise);
    r.sinr_private(k) = gains(k, k + 1) / (private_sum - gains(k, k + 1) + noise);
  }
  return r;
}

RateReport compute_rates(RateReport report, const RVec& common_alloc) {
  const auto k_users = report.sinr_common.size();
  if (common_alloc.size() != k_users) throw DimensionMismatch("common_alloc must have K entries");
  report.rate_common = report.sinr_common.array().log1p() / kLn2;
  report.rate_private = report.sinr_private.array().log1p() / kLn2;
  report.common_capacity = report.rate_common.minCoeff();
  report.per_user_total = common_alloc / kLn2 + report.rate_private;
  report.mmf_rate = report.per_user_total.minCoeff();
  return report;
}

RateReport evaluate_rates(const PrecoderState& p, const Scenario& s) {
  return compute_rates(compute_sinrs(p.precoders, s), p.common_alloc);
}

double total_power(const CMat& precoders) { return precoders.squaredNorm(); }

RVec optimal_common_allocation(const RVec& private_rates, double capacity) {
  const auto n = private_rates.size();
  RVec c = RVec::Zero(n);
  if (capacity <= 0.0 || n == 0) return c;

  std::vector<double> sorted(private_rates.data(), private_rates.data() + n);
  std::sort(sorted.begin(), sorted.end());
  // Raise the water level over the m lowest private rates until the budget
  // is spent or the next rate is reached.
  double level = sorted.back();
  double prefix = 0.0;
  for (Eigen::Index m = 1; m <= n; ++m) {
    prefix += sorted[m - 1];
    const double candidate = (capacity + prefix) / static_cast<double>(m);
    if (m == n || candidate <= sorted[m]) {
      level = candidate;
      break;
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) c(k) = std::max(0.0, level - private_rates(k));
  // Remove rounding excess so sum(c) <= capacity holds exactly.
  const double total = c.sum();
  if (total > capacity) c *= capacity / total;
  return c;
}

namespace {

double sensing_penalty(const CMat& precoders, const Scenario& s, double tradeoff) {
  if (tradeoff == 0.0) return 0.0;
  return tradeoff * crb_trace(fim(precoders, s));
}

}  // namespace

double objective(const PrecoderState& p, const Scenario& s, double tradeoff) {
  const RateReport r = compute_sinrs(p.precoders, s);
  const RVec private_nats = r.sinr_private.array().log1p();
  return (p.common_alloc + private_nats).minCoeff() - sensing_penalty(p.precoders, s, tradeoff);
}

namespace {

double best_mmf_nats(const CMat& precoders, const Scenario& s) {
  const RateReport r = compute_sinrs(precoders, s);
  const RVec private_nats = r.sinr_private.array().log1p();
  const double capacity = r.sinr_common.array().log1p().minCoeff();
  const RVec c = optimal_common_allocation(private_nats, capacity);
  return (c + private_nats).minCoeff();
}

}  // namespace

double precoder_objective(const CMat& precoders, const Scenario& s, double tradeoff) {
  return best_mmf_nats(precoders, s) - sensing_penalty(precoders, s, tradeoff);
}

double precoder_objective(const CMat& precoders, const Scenario& s, double tradeoff, const SensingModel& model) {
  const double mmf = best_mmf_nats(precoders, s);
  return tradeoff == 0.0 ? mmf : mmf - tradeoff * crb_trace(model.fim(precoders));
}

double FeasibilityReport::worst() const {
  double w = std::min({common_rate_slack, alloc_slack, power_slack});
  if (eh_slack.size() > 0) w = std::min(w, eh_slack.minCoeff());
  return w;
}

FeasibilityReport check_feasibility(const PrecoderState& p, const Scenario& s, const SystemConfig& cfg) {
  const RateReport r = compute_sinrs(p.precoders, s);
  FeasibilityReport f;
  f.common_rate_slack = r.sinr_common.array().log1p().minCoeff() - p.common_alloc.sum();
  f.alloc_slack = p.common_alloc.minCoeff();
  const double budget = power_from_snr(cfg);
  f.power_slack = (budget - total_power(p.precoders)) / budget;

  const RVec q = received_power(p.precoders, s.er_channels);
  f.eh_slack.resize(s.n_ers());
  for (int l = 0; l < s.n_ers(); ++l) {
    const EhCircuit circuit(cfg.eh_circuits.at(l));
    const double e = cfg.eh_thresholds.at(l);
    const double gamma = harvested_power(circuit, q(l));
    f.eh_slack(l) = e > 0.0 ? (gamma - e) / e : gamma - e;
  }
  return f;
}

}  // namespace iscap
