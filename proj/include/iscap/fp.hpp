// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>

#include "iscap/scenario.hpp"
#include "iscap/types.hpp"

namespace iscap {

/// Fractional-programming auxiliaries: theta (Lagrangian-dual transform) and
/// phi (quadratic transform) for the common and private stream of every IR.
struct AuxState {
  RVec theta_c;
  RVec theta_p;
  CVec phi_c;
  CVec phi_p;
};

enum class Stream { common, priv };

/// theta_{i,k} <- gamma_{i,k}.
std::pair<RVec, RVec> update_theta(const CMat& precoders, const Scenario& s);

/// phi_{i,k} = sqrt(1 + theta_{i,k}) h_k^H p_i / T_{i,k}, with
/// T_c = |h^H p_c|^2 + sum_j |h^H p_j|^2 + sigma^2 and T_p = T_c - |h^H p_c|^2.
std::pair<CVec, CVec> update_phi(const CMat& precoders, const Scenario& s, const RVec& theta_c, const RVec& theta_p);

/// Both updates in sequence; the surrogate is then tight at `precoders`.
AuxState update_aux(const CMat& precoders, const Scenario& s);

/// g_{i,k} = ln(1+theta) - theta + 2 sqrt(1+theta) Re{conj(phi) h_k^H p_i} - |phi|^2 T_{i,k}.
/// A lower bound on ln(1 + gamma_{i,k}) for every (theta >= 0, phi).
double surrogate_g(const CMat& precoders, const Scenario& s, const AuxState& aux, Stream stream, int k);

}  // namespace iscap
