// SPDX-License-Identifier: Apache-2.0
#include "iscap/energy.hpp"

#include <cmath>
#include <string>

#include "iscap/errors.hpp"

namespace iscap {

EhCircuit::EhCircuit(double max_dc_power, double steepness, double turning_point)
    : m_(max_dc_power), upsilon_(steepness), varsigma_(turning_point) {
  if (!(m_ > 0.0 && upsilon_ > 0.0 && varsigma_ > 0.0))
    throw ConfigError("EH circuit constants must be positive");
  const double e = std::exp(upsilon_ * varsigma_);
  x_ = e / (1.0 + e);
  y_ = m_ / e;
}

double harvested_power(const EhCircuit& c, double q) {
  return c.m() / (c.x() * (1.0 + std::exp(-c.upsilon() * (q - c.varsigma())))) - c.y();
}

double invert_threshold(const EhCircuit& c, double e_min) {
  if (!(e_min >= 0.0) || e_min >= c.m())
    throw ThresholdUnreachable("EH threshold " + std::to_string(e_min) + " W outside [0, M)");
  if (e_min == 0.0) return 0.0;
  const double arg = c.m() / ((e_min + c.y()) * c.x()) - 1.0;
  if (!(arg > 0.0)) throw ThresholdUnreachable("EH threshold " + std::to_string(e_min) + " W is not reachable");
  return c.varsigma() - std::log(arg) / c.upsilon();
}

RVec received_power(const CMat& precoders, const CMat& er_channels) {
  if (er_channels.cols() > 0 && er_channels.rows() != precoders.rows())
    throw DimensionMismatch("ER channels and precoders disagree on n_tx");
  return (er_channels.adjoint() * precoders).cwiseAbs2().rowwise().sum();
}

double linearized_received_power(const CVec& g, const CVec& p, const CVec& p_anchor) {
  if (g.size() != p.size() || g.size() != p_anchor.size())
    throw DimensionMismatch("linearized_received_power: length mismatch");
  const cplx at_anchor = g.dot(p_anchor);  // g^H p_anchor
  const cplx at_p = g.dot(p);
  return 2.0 * std::real(std::conj(at_anchor) * at_p) - std::norm(at_anchor);
}

RVec eh_constraint_slack(const CMat& precoders, const CMat& anchor, const CMat& er_channels,
                         const RVec& received_targets) {
  if (precoders.rows() != anchor.rows() || precoders.cols() != anchor.cols())
    throw DimensionMismatch("precoder and anchor shapes differ");
  if (received_targets.size() != er_channels.cols()) throw DimensionMismatch("one target per ER required");
  const CMat at_anchor = er_channels.adjoint() * anchor;
  const CMat at_p = er_channels.adjoint() * precoders;
  const RVec u = (2.0 * (at_anchor.conjugate().cwiseProduct(at_p)).real() - at_anchor.cwiseAbs2()).rowwise().sum();
  return u - received_targets;
}

RVec eh_constraint_slack(const CMat& precoders, const CMat& anchor, const Scenario& s,
                         const std::vector<EhParams>& circuits, const std::vector<double>& thresholds) {
  if (circuits.size() != static_cast<std::size_t>(s.n_ers()) || thresholds.size() != circuits.size())
    throw DimensionMismatch("one circuit and threshold per ER required");
  RVec targets(s.n_ers());
  for (int l = 0; l < s.n_ers(); ++l) targets(l) = invert_threshold(EhCircuit(circuits[l]), thresholds[l]);
  return eh_constraint_slack(precoders, anchor, s.er_channels, targets);
}

RVec received_power_targets(const SystemConfig& cfg) {
  RVec targets(cfg.n_ers);
  for (int l = 0; l < cfg.n_ers; ++l)
    targets(l) = invert_threshold(EhCircuit(cfg.eh_circuits.at(l)), cfg.eh_thresholds.at(l));
  return targets;
}

}  // namespace iscap
