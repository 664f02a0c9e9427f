// SPDX-License-Identifier: Apache-2.0
// Random instances shared by the unit tests.
#pragma once

#include <cmath>
#include <random>

#include "iscap/algorithm.hpp"
#include "iscap/dual_eg.hpp"
#include "iscap/fp.hpp"
#include "iscap/scenario.hpp"
#include "iscap/sensing.hpp"
#include "iscap/types.hpp"

namespace iscap::test {

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  cplx cn() { return cplx(normal(), normal()) * std::sqrt(0.5); }
  CMat cmat(Eigen::Index r, Eigen::Index c) {
    CMat m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = cn();
    return m;
  }
  CVec cvec(Eigen::Index n) { return cmat(n, 1).col(0); }
};

inline Scenario random_scenario(Rng& rng, int n_tx, int k_users, int n_ers, int n_rx = 4) {
  Scenario s;
  s.ir_channels = rng.cmat(n_tx, k_users);
  s.er_channels = rng.cmat(n_tx, n_ers);
  s.theta = rng.uniform(-1.0, 1.0);
  s.alpha = rng.cn();
  s.noise_comm = RVec::Constant(k_users, 1.0);
  s.noise_sense = 1.0;
  s.n_rx = n_rx;
  return s;
}

/// A subproblem context with random but well-scaled frozen data.
inline SubproblemContext random_context(Rng& rng, int n_tx, int k_users, int n_ers, AccessMode mode) {
  const Scenario s = random_scenario(rng, n_tx, k_users, n_ers);
  const AuxState aux = update_aux(rng.cmat(n_tx, k_users + 1), s);
  const CMat m = rng.cmat(n_tx, n_tx);
  RVec targets(n_ers);
  for (int l = 0; l < n_ers; ++l) targets(l) = rng.uniform(0.1, 1.0);
  return make_context(s, aux, rng.cmat(n_tx, k_users + 1), m * m.adjoint(), targets, 0.1, 2.0, mode);
}

inline VIPoint random_point(Rng& rng, const SubproblemContext& ctx) {
  const ViLayout lay = ctx.layout();
  VIPoint pt;
  pt.primal.precoders = rng.cmat(lay.n_tx, lay.n_users + 1);
  pt.primal.common_alloc = RVec(lay.n_users);
  for (int k = 0; k < lay.n_users; ++k) pt.primal.common_alloc(k) = rng.uniform(0.0, 1.0);
  pt.primal.mmf_aux = rng.uniform(0.0, 2.0);
  pt.dual = DualState::initial(lay.n_users, lay.n_ers, 0.0, AccessMode::rsma);
  for (int k = 0; k < lay.n_users; ++k) {
    pt.dual.beta(k) = rng.uniform(0.0, 1.0);
    pt.dual.rho(k) = rng.uniform(0.0, 1.0);
    pt.dual.mu(k) = rng.uniform(0.0, 1.0);
  }
  pt.dual.omega = rng.uniform(0.0, 1.0);
  for (int l = 0; l < lay.n_ers; ++l) pt.dual.eta(l) = rng.uniform(0.0, 1.0);
  return pt;
}

/// Small default config for end-to-end tests.
inline SystemConfig small_config() {
  SystemConfig cfg;
  cfg.n_tx = 4;
  cfg.n_rx = 4;
  cfg.n_users = 4;
  cfg.n_ers = 2;
  return cfg;
}

/// A subproblem as the optimizer builds it at its first middle iteration, on
/// a normalised scenario. Each EH target is half of the linearised power the
/// ER could reach, so the constraint is attainable.
struct NormalizedSubproblem {
  Scenario scenario;
  SubproblemContext ctx;
  VIPoint start;
};

inline NormalizedSubproblem normalized_subproblem(const SystemConfig& cfg, std::uint64_t offset, AccessMode mode) {
  const double power = power_from_snr(cfg);
  const Scenario raw = generate_scenario(cfg, offset);
  NormalizedSubproblem out;
  out.scenario =
      normalized_scenario(raw, power, RVec::Constant(raw.n_ers(), power * raw.er_channels.squaredNorm()));
  const Scenario& s = out.scenario;
  out.start.primal = init_precoder(s, 1.0, mode);
  const CMat& anchor = out.start.primal.precoders;
  const SurrogateBundle sb = surrogate_matrices(fim(anchor, s), cfg.psd_margin);
  RVec targets(s.n_ers());
  for (int l = 0; l < s.n_ers(); ++l) {
    const CVec g = s.er_channels.col(l);
    const double a_norm = (g.adjoint() * anchor).norm();
    targets(l) = 0.5 * std::max(2.0 * a_norm * g.norm() - a_norm * a_norm, 0.0);
  }
  out.ctx = make_context(s, update_aux(anchor, s), anchor, sb.lambda_mat, targets, cfg.tradeoff, 1.0, mode);
  out.start.dual = DualState::initial(s.n_users(), s.n_ers(), cfg.dual_init, mode);
  return out;
}

}  // namespace iscap::test
