// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "iscap/scenario.hpp"
#include "iscap/types.hpp"

namespace iscap {

/// Precoder matrix P = [p_c, p_1, ..., p_K] (column 0 is the common stream),
/// the common-rate split c and the max-min auxiliary r.
///
/// c and r are in nats: the optimizer works with natural-log rates and only
/// reports convert to bits.
struct PrecoderState {
  CMat precoders;
  RVec common_alloc;
  double mmf_aux = 0.0;

  int n_tx() const { return static_cast<int>(precoders.rows()); }
  int n_users() const { return static_cast<int>(precoders.cols()) - 1; }
  auto common() const { return precoders.col(0); }
  auto private_col(int k) const { return precoders.col(k + 1); }

  static PrecoderState zeros(int n_tx, int n_users);
};

/// SINRs and rates. Rate fields are in bits per channel use.
struct RateReport {
  RVec sinr_common;
  RVec sinr_private;
  RVec rate_common;
  RVec rate_private;
  double common_capacity = 0.0;
  RVec per_user_total;
  double mmf_rate = 0.0;
};

/// Fills the SINR fields; private SINRs assume the common stream was removed
/// by SIC. Throws DimensionMismatch when P does not match the scenario.
RateReport compute_sinrs(const CMat& precoders, const Scenario& s);
inline RateReport compute_sinrs(const PrecoderState& p, const Scenario& s) { return compute_sinrs(p.precoders, s); }

/// Fills rate fields from the SINRs; common_alloc (nats) enters per_user_total.
RateReport compute_rates(RateReport report, const RVec& common_alloc);

/// SINRs and rates in one call.
RateReport evaluate_rates(const PrecoderState& p, const Scenario& s);

/// tr(P P^H).
double total_power(const CMat& precoders);
inline double total_power(const PrecoderState& p) { return total_power(p.precoders); }

/// Best split of the common capacity: maximises min_k (c_k + private_k)
/// subject to sum(c) <= capacity and c >= 0 (water-filling on the private
/// rates). Any consistent unit works.
RVec optimal_common_allocation(const RVec& private_rates, double capacity);

/// min_k (c_k + ln(1 + gamma_pk)) - tradeoff * tr(F^-1) using the state's c.
/// The sensing term is skipped entirely when tradeoff == 0.
double objective(const PrecoderState& p, const Scenario& s, double tradeoff);

/// objective() with c replaced by optimal_common_allocation() for P; this is
/// the obj(P) used by every convergence test of the optimizer.
double precoder_objective(const CMat& precoders, const Scenario& s, double tradeoff);

class SensingModel;
/// Same, reusing a precomputed echo geometry for the scenario.
double precoder_objective(const CMat& precoders, const Scenario& s, double tradeoff, const SensingModel& model);

/// Signed slacks of the constraints of the original problem. Power and EH
/// slacks are relative to P_t and E_l (absolute when E_l = 0); rate slacks
/// are in nats.
struct FeasibilityReport {
  double common_rate_slack = 0.0;  // min_k R_ck - sum(c)
  double alloc_slack = 0.0;        // min_k c_k
  double power_slack = 0.0;        // (P_t - tr(PP^H)) / P_t
  RVec eh_slack;                   // (Gamma_l - E_l) / E_l

  double worst() const;
  bool feasible(double tol) const { return worst() >= -tol; }
};

FeasibilityReport check_feasibility(const PrecoderState& p, const Scenario& s, const SystemConfig& cfg);

}  // namespace iscap
