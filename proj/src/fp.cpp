// SPDX-License-Identifier: Apache-2.0
#include "iscap/fp.hpp"

#include <cmath>

#include "iscap/errors.hpp"
#include "iscap/rsma.hpp"

namespace iscap {

namespace {

struct Denominators {
  CMat inner;  // inner(k, j) = h_k^H p_j
  RVec t_common;
  RVec t_private;
};

Denominators denominators(const CMat& precoders, const Scenario& s) {
  if (precoders.rows() != s.n_tx() || precoders.cols() != s.n_users() + 1)
    throw DimensionMismatch("precoder matrix must be n_tx x (K+1)");
  Denominators d;
  d.inner = s.ir_channels.adjoint() * precoders;
  const RMat gains = d.inner.cwiseAbs2();
  const int k_users = s.n_users();
  d.t_private.resize(k_users);
  d.t_common.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    d.t_private(k) = gains.row(k).tail(k_users).sum() + s.noise_comm(k);
    d.t_common(k) = d.t_private(k) + gains(k, 0);
  }
  return d;
}

}  // namespace

std::pair<RVec, RVec> update_theta(const CMat& precoders, const Scenario& s) {
  const RateReport r = compute_sinrs(precoders, s);
  return {r.sinr_common, r.sinr_private};
}

std::pair<CVec, CVec> update_phi(const CMat& precoders, const Scenario& s, const RVec& theta_c,
                                 const RVec& theta_p) {
  const Denominators d = denominators(precoders, s);
  const int k_users = s.n_users();
  if (theta_c.size() != k_users || theta_p.size() != k_users) throw DimensionMismatch("theta must have K entries");
  CVec phi_c(k_users), phi_p(k_users);
  for (int k = 0; k < k_users; ++k) {
    phi_c(k) = std::sqrt(1.0 + theta_c(k)) * d.inner(k, 0) / d.t_common(k);
    phi_p(k) = std::sqrt(1.0 + theta_p(k)) * d.inner(k, k + 1) / d.t_private(k);
  }
  return {phi_c, phi_p};
}

AuxState update_aux(const CMat& precoders, const Scenario& s) {
  AuxState aux;
  std::tie(aux.theta_c, aux.theta_p) = update_theta(precoders, s);
  std::tie(aux.phi_c, aux.phi_p) = update_phi(precoders, s, aux.theta_c, aux.theta_p);
  return aux;
}

double surrogate_g(const CMat& precoders, const Scenario& s, const AuxState& aux, Stream stream, int k) {
  const Denominators d = denominators(precoders, s);
  const bool common = stream == Stream::common;
  const double theta = common ? aux.theta_c(k) : aux.theta_p(k);
  const cplx phi = common ? aux.phi_c(k) : aux.phi_p(k);
  const cplx signal = d.inner(k, common ? 0 : k + 1);
  const double t = common ? d.t_common(k) : d.t_private(k);
  return std::log1p(theta) - theta + 2.0 * std::sqrt(1.0 + theta) * std::real(std::conj(phi) * signal) -
         std::norm(phi) * t;
}

}  // namespace iscap
