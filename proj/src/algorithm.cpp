// SPDX-License-Identifier: Apache-2.0
#include "iscap/algorithm.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "iscap/dual_eg.hpp"
#include "iscap/energy.hpp"
#include "iscap/errors.hpp"
#include "iscap/fp.hpp"
#include "iscap/sensing.hpp"

namespace iscap {

double RunRecord::seconds_per_inner_iteration() const {
  return inner_iterations > 0 ? times.inner / inner_iterations : 0.0;
}

PrecoderState init_precoder(const Scenario& s, double power, AccessMode mode) {
  const int n = s.n_tx();
  const int k_users = s.n_users();
  PrecoderState p = PrecoderState::zeros(n, k_users);
  const bool rsma = mode == AccessMode::rsma;
  const double per_stream = std::sqrt(power / (rsma ? k_users + 1 : k_users));
  for (int k = 0; k < k_users; ++k) {
    const double nrm = s.ir_channels.col(k).norm();
    if (nrm > 0.0) p.precoders.col(k + 1) = per_stream * s.ir_channels.col(k) / nrm;
  }
  if (rsma) {
    CVec sum = s.ir_channels.rowwise().sum();
    if (sum.norm() == 0.0) sum = s.ir_channels.col(0);
    if (sum.norm() > 0.0) p.precoders.col(0) = per_stream * sum / sum.norm();
  }
  // Zero channels leave columns empty; restore the exact power budget.
  if (p.precoders.norm() > 0.0) p.precoders = renormalize_power(p.precoders, power);
  return p;
}

CMat renormalize_power(const CMat& precoders, double power) {
  const double nrm = precoders.norm();
  if (!(nrm > 0.0)) throw ZeroPrecoder("cannot renormalise a zero precoder");
  return (std::sqrt(power) / nrm) * precoders;
}

PrecoderState renormalize_power(const PrecoderState& p, double power) {
  PrecoderState out = p;
  out.precoders = renormalize_power(p.precoders, power);
  return out;
}

Scenario normalized_scenario(const Scenario& s, double power, const RVec& received_targets) {
  if (received_targets.size() != s.n_ers()) throw DimensionMismatch("one target per ER");
  Scenario ns = s;
  const double root = std::sqrt(power);
  ns.ir_channels *= root;
  for (int l = 0; l < s.n_ers(); ++l) {
    const double t = received_targets(l);
    ns.er_channels.col(l) *= t > 0.0 ? std::sqrt(power / t) : root;
  }
  ns.noise_sense = s.noise_sense / power;
  return ns;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Best c and r for P under the frozen surrogate rates.
void warm_allocation(const CMat& precoders, const SubproblemContext& ctx, PrecoderState& state) {
  SubproblemOperator op(ctx);
  const ViLayout lay = op.layout();
  VIPoint probe;
  probe.primal = state;
  probe.primal.precoders = precoders;
  probe.dual = DualState::initial(lay.n_users, lay.n_ers, 0.0, ctx.mode);
  RVec g_private, g_common;
  op.surrogate_rates(stack(probe), g_private, g_common);
  if (ctx.mode == AccessMode::rsma) {
    state.common_alloc = optimal_common_allocation(g_private, std::max(0.0, g_common.minCoeff()));
  } else {
    state.common_alloc.setZero();
  }
  state.mmf_aux = (state.common_alloc + g_private).minCoeff();
}

}  // namespace

RunRecord run(const Scenario& s, const SystemConfig& cfg, AccessMode mode) {
  const auto t_start = Clock::now();
  validate(cfg);
  if (s.n_tx() != cfg.n_tx || s.n_users() != cfg.n_users || s.n_ers() != cfg.n_ers)
    throw DimensionMismatch("scenario does not match config dimensions");

  RunRecord rec;
  rec.mode = mode;
  rec.seed = s.seed_offset;
  rec.rng_seed = cfg.rng_seed;

  const double power = power_from_snr(cfg);
  const RVec targets = received_power_targets(cfg);
  const Scenario ns = normalized_scenario(s, power, targets);
  RVec unit_targets(s.n_ers());
  for (int l = 0; l < s.n_ers(); ++l) unit_targets(l) = targets(l) > 0.0 ? 1.0 : 0.0;

  const SensingModel model(ns);
  const double lambda = cfg.tradeoff;
  auto obj = [&](const CMat& p) { return precoder_objective(p, ns, lambda, model); };

  const int k_users = s.n_users();
  const int n_ers = s.n_ers();
  PrecoderState state = init_precoder(ns, 1.0, mode);
  {
    PrecoderState original = state;
    original.precoders *= std::sqrt(power);
    rec.initial_feasibility = check_feasibility(original, s, cfg);
  }
  const EgParams eg{cfg.step_init, cfg.step_shrink};

  // Inner-loop feasibility gap: worst relative EH shortfall of the
  // renormalised precoder, measured through the rectifier model.
  std::vector<EhCircuit> circuits;
  for (const EhParams& c : cfg.eh_circuits) circuits.emplace_back(c);
  RVec unit_power(n_ers);
  for (int l = 0; l < n_ers; ++l) unit_power(l) = targets(l) > 0.0 ? targets(l) : power;
  auto eh_gap = [&](const CMat& p) {
    const double nrm = p.squaredNorm();
    if (!(nrm > 0.0)) return std::numeric_limits<double>::infinity();
    const RVec q = received_power(p, ns.er_channels) / nrm;
    double worst = 0.0;
    for (int l = 0; l < n_ers; ++l) {
      const double e = cfg.eh_thresholds[l];
      const double shortfall = e - harvested_power(circuits[l], unit_power(l) * q(l));
      worst = std::max(worst, e > 0.0 ? shortfall / e : shortfall);
    }
    return worst;
  };

  DualState duals = DualState::initial(k_users, n_ers, cfg.dual_init, mode);
  double f1_prev = obj(state.precoders);
  rec.outer_trace.push_back(f1_prev);
  rec.times.setup = seconds_since(t_start);

  for (int i = 1; i <= cfg.max_outer; ++i) {
    auto t0 = Clock::now();
    const AuxState aux = update_aux(state.precoders, ns);
    rec.times.aux += seconds_since(t0);

    double f2_prev = f1_prev;
    bool middle_done = false;
    for (int t = 1; t <= cfg.max_middle; ++t) {
      t0 = Clock::now();
      const SurrogateBundle sb = surrogate_matrices(fim(state.precoders, ns), cfg.psd_margin);
      const SubproblemContext ctx =
          make_context(ns, aux, state.precoders, sb.lambda_mat, unit_targets, lambda, 1.0, mode);
      VIPoint start;
      start.primal = state;
      warm_allocation(state.precoders, ctx, start.primal);
      start.dual = cfg.warm_start_duals ? duals : DualState::initial(k_users, n_ers, cfg.dual_init, mode);
      rec.times.surrogate += seconds_since(t0);

      t0 = Clock::now();
      const SubproblemResult res = solve_subproblem(start, ctx, eg, cfg.tol_inner, cfg.max_inner, obj, eh_gap);
      rec.times.inner += seconds_since(t0);
      rec.inner_iterations += res.iterations;
      if (res.hit_cap) ++rec.inner_cap_hits;

      duals = res.point.dual;
      state = renormalize_power(res.point.primal, 1.0);
      const double f2 = obj(state.precoders);
      rec.middle_trace.push_back({i, t, res.iterations, res.hit_cap, f2});
      ++rec.middle_iterations;
      const bool stop = std::abs(f2 - f2_prev) < cfg.tol_middle;
      f2_prev = f2;
      if (stop) {
        middle_done = true;
        break;
      }
    }
    if (!middle_done) ++rec.middle_cap_hits;

    const double f1 = obj(state.precoders);
    rec.outer_trace.push_back(f1);
    rec.outer_iterations = i;
    const bool stop = std::abs(f1 - f1_prev) < cfg.tol_outer;
    f1_prev = f1;
    if (stop) {
      rec.tolerance_reached = true;
      break;
    }
  }

  // Back to physical units; report c from the best split of the true rates.
  state.precoders *= std::sqrt(power);
  const RateReport sinr = compute_sinrs(state.precoders, s);
  const RVec private_nats = sinr.sinr_private.array().log1p();
  if (mode == AccessMode::rsma) {
    state.common_alloc = optimal_common_allocation(private_nats, sinr.sinr_common.array().log1p().minCoeff());
  } else {
    state.common_alloc.setZero();
  }
  state.mmf_aux = (state.common_alloc + private_nats).minCoeff();
  rec.state = state;
  rec.rates = compute_rates(sinr, state.common_alloc);
  rec.crb = crb_trace(fim(state.precoders, s));
  rec.objective = objective(state, s, lambda);
  rec.feasibility = check_feasibility(state, s, cfg);
  rec.converged = rec.tolerance_reached && rec.feasibility.feasible(kFeasibilityTol);
  rec.times.total = seconds_since(t_start);
  return rec;
}

}  // namespace iscap
