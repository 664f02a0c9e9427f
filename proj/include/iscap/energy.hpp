// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "iscap/scenario.hpp"
#include "iscap/types.hpp"

namespace iscap {

/// Logistic rectifier model. x() and y() are the normalisation constants that
/// pin the output to zero at zero input power; they are always derived from
/// (m, upsilon, varsigma).
class EhCircuit {
 public:
  EhCircuit(double max_dc_power, double steepness, double turning_point);
  explicit EhCircuit(const EhParams& p) : EhCircuit(p.max_dc_power, p.steepness, p.turning_point) {}

  double m() const { return m_; }
  double upsilon() const { return upsilon_; }
  double varsigma() const { return varsigma_; }
  double x() const { return x_; }
  double y() const { return y_; }

 private:
  double m_;
  double upsilon_;
  double varsigma_;
  double x_;
  double y_;
};

/// Harvested DC power for received RF power q >= 0.
double harvested_power(const EhCircuit& circuit, double q);

/// Received RF power that yields exactly e_min of harvested power. Throws
/// ThresholdUnreachable for e_min outside [0, M) or beyond the logistic range.
double invert_threshold(const EhCircuit& circuit, double e_min);

/// Q_l = |g_l^H p_c|^2 + sum_k |g_l^H p_k|^2 for every ER.
RVec received_power(const CMat& precoders, const CMat& er_channels);

/// First-order expansion of |g^H p|^2 around p_anchor; a global minorant.
double linearized_received_power(const CVec& g, const CVec& p, const CVec& p_anchor);

/// Linearised EH constraint values sum_i U(g_l, p_i, p_i^anchor) - target_l.
RVec eh_constraint_slack(const CMat& precoders, const CMat& anchor, const CMat& er_channels,
                         const RVec& received_targets);

/// Same, inverting each E_l through its circuit first.
RVec eh_constraint_slack(const CMat& precoders, const CMat& anchor, const Scenario& s,
                         const std::vector<EhParams>& circuits, const std::vector<double>& thresholds);

/// Inverted thresholds for every ER of a config.
RVec received_power_targets(const SystemConfig& cfg);

}  // namespace iscap
