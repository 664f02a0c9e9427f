// SPDX-License-Identifier: Apache-2.0
#include "verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "iscap/algorithm.hpp"
#include "iscap/dual_eg.hpp"
#include "iscap/energy.hpp"
#include "iscap/fp.hpp"
#include "iscap/rsma.hpp"
#include "iscap/sensing.hpp"
#include "oracle.hpp"

namespace iscap::oracle {

namespace {

using Clock = std::chrono::steady_clock;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
  cplx cn() { return cplx(normal(), normal()) * std::sqrt(0.5); }
  CMat cmat(Eigen::Index r, Eigen::Index c) {
    CMat m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = cn();
    return m;
  }
};

Scenario random_scenario(Rng& rng, int n_tx, int n_rx, int k_users, int n_ers) {
  Scenario s;
  s.ir_channels = rng.cmat(n_tx, k_users);
  s.er_channels = rng.cmat(n_tx, n_ers);
  s.theta = rng.uniform(-1.2, 1.2);
  s.alpha = rng.cn();
  s.noise_comm = RVec::Constant(k_users, rng.uniform(0.5, 2.0));
  s.noise_sense = rng.uniform(0.5, 2.0);
  s.n_rx = n_rx;
  return s;
}

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

CheckResult finish(CheckResult r, Clock::time_point t0, double time_limit) {
  r.seconds = elapsed(t0);
  if (time_limit > 0.0 && r.seconds >= time_limit) {
    r.pass = false;
    r.detail += ", over the " + sci(time_limit) + " s limit";
  }
  return r;
}

// L(y, z) = y z. With both coordinates free the origin is the unique
// saddle. With z >= 0 (z as a multiplier) every (y >= 0, 0) is a saddle.
struct BilinearSaddle {
  bool nonnegative_z = false;
  void apply(const RVec& x, RVec& h) const {
    h.resize(2);
    h(0) = -x(1);
    h(1) = x(0);
  }
  void project(RVec& x) const {
    if (nonnegative_z) x(1) = std::max(0.0, x(1));
  }
};

struct SaddleRun {
  RVec x;
  int steps = 0;
  double residual = 1.0;
};

SaddleRun run_saddle(bool nonnegative_z) {
  BilinearSaddle saddle{nonnegative_z};
  Extragradient<BilinearSaddle> eg(saddle, EgParams{});
  SaddleRun r;
  r.x = RVec::Ones(2);
  while (r.steps < 10000 && r.residual >= 1e-6) {
    r.residual = eg.step(r.x).residual;
    ++r.steps;
  }
  return r;
}

}  // namespace

CheckResult check_fp_tightness(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult res{1, "fp_tightness", true, {}, 0.0};
  Rng rng(seed);
  double tight = 0.0;
  double bound = -std::numeric_limits<double>::infinity();
  const int k_users = 4;
  for (int trial = 0; trial < 100; ++trial) {
    const Scenario s = random_scenario(rng, 4, 4, k_users, 0);
    const CMat p = rng.cmat(4, k_users + 1) * rng.uniform(0.2, 5.0);
    const AuxState aux = update_aux(p, s);
    const auto [gamma_c, gamma_p] = sinr_by_loops(p, s);
    for (int k = 0; k < k_users; ++k) {
      tight = std::max(tight, std::abs(surrogate_g(p, s, aux, Stream::common, k) - std::log1p(gamma_c(k))));
      tight = std::max(tight, std::abs(surrogate_g(p, s, aux, Stream::priv, k) - std::log1p(gamma_p(k))));
    }
  }
  for (int trial = 0; trial < 10000; ++trial) {
    const Scenario s = random_scenario(rng, 4, 4, k_users, 0);
    const CMat p = rng.cmat(4, k_users + 1) * rng.uniform(0.2, 5.0);
    AuxState aux;
    aux.theta_c = aux.theta_p = RVec(k_users);
    aux.phi_c = aux.phi_p = CVec(k_users);
    for (int k = 0; k < k_users; ++k) {
      aux.theta_c(k) = rng.uniform(0.0, 10.0);
      aux.theta_p(k) = rng.uniform(0.0, 10.0);
      aux.phi_c(k) = rng.cn();
      aux.phi_p(k) = rng.cn();
    }
    const auto [gamma_c, gamma_p] = sinr_by_loops(p, s);
    const int k = trial % k_users;
    bound = std::max(bound, surrogate_g(p, s, aux, Stream::common, k) - std::log1p(gamma_c(k)));
    bound = std::max(bound, surrogate_g(p, s, aux, Stream::priv, k) - std::log1p(gamma_p(k)));
  }
  res.pass = tight < 1e-10 && bound <= 1e-12;
  res.detail = "max |g - ln(1+gamma)| at optimum " + sci(tight) + ", max g - ln(1+gamma) " + sci(bound);
  return finish(res, t0, 5.0);
}

CheckResult check_gradients(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult res{2, "gradients", true, {}, 0.0};
  Rng rng(seed);
  const int n_tx = 4, k_users = 3, n_ers = 2;
  double worst_fd = 0.0;
  double worst_loop = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Scenario s = random_scenario(rng, n_tx, 4, k_users, n_ers);
    AuxState aux = update_aux(rng.cmat(n_tx, k_users + 1), s);
    const CMat anchor = rng.cmat(n_tx, k_users + 1);
    const CMat m = rng.cmat(n_tx, n_tx);
    const CMat lambda_mat = m * m.adjoint();
    RVec targets(n_ers);
    for (int l = 0; l < n_ers; ++l) targets(l) = rng.uniform(0.1, 1.0);
    const SubproblemContext ctx =
        make_context(s, aux, anchor, lambda_mat, targets, rng.uniform(0.05, 0.5), rng.uniform(1.0, 3.0),
                     AccessMode::rsma);

    VIPoint pt;
    pt.primal.precoders = rng.cmat(n_tx, k_users + 1);
    pt.primal.common_alloc = RVec(k_users);
    for (int k = 0; k < k_users; ++k) pt.primal.common_alloc(k) = rng.uniform(0.0, 1.0);
    pt.primal.mmf_aux = rng.uniform(0.0, 2.0);
    pt.dual = DualState::initial(k_users, n_ers, 0.0, AccessMode::rsma);
    for (int k = 0; k < k_users; ++k) {
      pt.dual.beta(k) = rng.uniform(0.0, 1.0);
      pt.dual.rho(k) = rng.uniform(0.0, 1.0);
      pt.dual.mu(k) = rng.uniform(0.0, 1.0);
    }
    pt.dual.omega = rng.uniform(0.0, 1.0);
    for (int l = 0; l < n_ers; ++l) pt.dual.eta(l) = rng.uniform(0.0, 1.0);

    const double l_lib = lagrangian_value(pt, ctx);
    worst_loop = std::max(worst_loop, std::abs(l_lib - lagrangian_by_loops(pt, ctx)) / std::max(1.0, std::abs(l_lib)));

    const ViLayout lay = ctx.layout();
    const RVec x = stack(pt);
    const RVec fd = fd_gradient([&](const RVec& y) { return lagrangian_value(unstack(y, lay), ctx); }, x);

    // Analytic partials in the stacked order. The real-stacked p-gradient of
    // a real function is 2 dL/dp*.
    RVec analytic(lay.size());
    for (int col = 0; col <= k_users; ++col) {
      const CVec g = 2.0 * grad_p(pt, ctx, col);
      const Eigen::Index re = col == 0 ? lay.common_re() : lay.private_re() + (col - 1) * n_tx;
      const Eigen::Index im = col == 0 ? lay.common_im() : lay.private_im() + (col - 1) * n_tx;
      analytic.segment(re, n_tx) = g.real();
      analytic.segment(im, n_tx) = g.imag();
    }
    const ScalarGradients sg = grad_scalars(pt, ctx);
    analytic.segment(lay.alloc(), k_users) = sg.dc;
    analytic(lay.mmf()) = sg.dr;
    analytic.segment(lay.beta(), k_users) = sg.dz.beta;
    analytic.segment(lay.rho(), k_users) = sg.dz.rho;
    analytic.segment(lay.mu(), k_users) = sg.dz.mu;
    analytic(lay.omega()) = sg.dz.omega;
    analytic.segment(lay.eta(), n_ers) = sg.dz.eta;
    worst_fd = std::max(worst_fd, max_rel_error(analytic, fd, 1e-6));

    // The VI map is the same gradient with the primal block negated.
    RVec expected_h = fd;
    expected_h.head(lay.primal_size()) *= -1.0;
    worst_fd = std::max(worst_fd, max_rel_error(vi_map(pt, ctx), expected_h, 1e-6));
  }
  res.pass = worst_fd < 1e-5 && worst_loop < 1e-10;
  res.detail = "max rel err vs finite differences " + sci(worst_fd) + ", vs scalar Lagrangian " + sci(worst_loop);
  return finish(res, t0, 10.0);
}

CheckResult check_fim(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult res{3, "fim_equivalence", true, {}, 0.0};
  Rng rng(seed);
  double worst_def = 0.0, worst_scale = 0.0, worst_crb = 0.0, worst_inv = 0.0;
  int crb_cases = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n_tx = rng.integer(1, 4), n_rx = rng.integer(1, 4), k_users = rng.integer(1, 3);
    const Scenario s = random_scenario(rng, n_tx, n_rx, k_users, 0);
    const CMat p = rng.cmat(n_tx, k_users + 1);
    const Mat3 f = fim(p, s).f;
    const Mat3 f_def = fim_by_definition(p, s);
    worst_def = std::max(worst_def, (f - f_def).norm() / f_def.norm());

    const Mat3 f2 = fim(std::sqrt(2.0) * p, s).f;
    worst_scale = std::max(worst_scale, (f2 - 2.0 * f).norm() / f.norm());
    if (!fim_is_singular(f)) {
      ++crb_cases;
      const double c1 = crb_trace(f);
      worst_crb = std::max(worst_crb, std::abs(crb_trace(f2) - 0.5 * c1) / c1);
      const double c_oracle = trace_product(inverse_by_cofactors(f_def), Mat3::Identity());
      worst_inv = std::max(worst_inv, std::abs(c1 - c_oracle) / c_oracle);
    }
  }
  res.pass = worst_def < 1e-9 && worst_scale < 1e-10 && worst_crb < 1e-10 && worst_inv < 1e-9 && crb_cases > 0;
  res.detail = "rel Frobenius err " + sci(worst_def) + ", scaling err " + sci(worst_scale) + ", CRB halving err " +
               sci(worst_crb) + " over " + std::to_string(crb_cases) + " nonsingular cases, cofactor err " +
               sci(worst_inv);
  return finish(res, t0, 0.0);
}

CheckResult check_energy(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult res{4, "energy_model", true, {}, 0.0};
  const EhCircuit circuit(EhParams{});
  double worst_round = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double e = circuit.m() * i / 100.0;
    worst_round = std::max(worst_round, std::abs(harvested_power(circuit, invert_threshold(circuit, e)) - e));
  }
  Rng rng(seed);
  double worst_minorant = -std::numeric_limits<double>::infinity();
  double worst_anchor = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = rng.integer(1, 6);
    const CVec g = rng.cmat(n, 1).col(0);
    const CVec p = rng.cmat(n, 1).col(0);
    const CVec a = rng.cmat(n, 1).col(0);
    cplx gp = 0.0;
    for (int i = 0; i < n; ++i) gp += std::conj(g(i)) * p(i);
    const double exact = std::norm(gp);
    worst_minorant = std::max(worst_minorant, (linearized_received_power(g, p, a) - exact) / std::max(exact, 1.0));
    worst_anchor = std::max(worst_anchor, std::abs(linearized_received_power(g, p, p) - exact) / std::max(exact, 1.0));
  }
  res.pass = worst_round < 1e-9 * circuit.m() && worst_minorant <= 1e-12 && worst_anchor <= 1e-12;
  res.detail = "round trip err " + sci(worst_round) + " W, max U - |g^H p|^2 " + sci(worst_minorant) +
               ", anchor gap " + sci(worst_anchor);
  return finish(res, t0, 0.0);
}

CheckResult check_extragradient(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult res{5, "extragradient", true, {}, 0.0};

  const SaddleRun free_run = run_saddle(false);
  const SaddleRun ray_run = run_saddle(true);
  const double dist = free_run.x.norm();
  const double ray_dist = std::abs(ray_run.x(1)) + std::max(0.0, -ray_run.x(0));
  const bool saddle_ok = free_run.residual < 1e-6 && dist < 1e-4 && ray_run.residual < 1e-6 && ray_dist < 1e-6;

  // Tiny subproblems on normalised scenarios, as the optimizer sees them.
  SystemConfig cfg;
  cfg.n_tx = 2;
  cfg.n_rx = 2;
  cfg.n_users = 2;
  cfg.n_ers = 1;
  normalize_er_arrays(cfg);
  const double power = power_from_snr(cfg);
  Rng rng(seed);
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_violation = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Scenario raw = generate_scenario(cfg, seed * 1000 + trial);
    const Scenario s = normalized_scenario(raw, power, RVec::Constant(1, power * raw.er_channels.squaredNorm()));
    const AccessMode mode = AccessMode::rsma;
    const PrecoderState start_state = init_precoder(s, 1.0, mode);
    const CMat& anchor = start_state.precoders;
    const AuxState aux = update_aux(anchor, s);
    const SurrogateBundle sb = surrogate_matrices(fim(anchor, s), 1e-8);
    // Half of the best linearised received power, so the EH constraint is
    // reachable and usually active.
    const CVec g = s.er_channels.col(0);
    const double a_norm = (g.adjoint() * anchor).norm();
    const double reach = 2.0 * a_norm * g.norm() - a_norm * a_norm;
    const RVec targets = RVec::Constant(1, 0.5 * std::max(reach, 0.0));
    const SubproblemContext ctx = make_context(s, aux, anchor, sb.lambda_mat, targets, 0.1, 1.0, mode);

    VIPoint start;
    start.primal = start_state;
    start.dual = DualState::initial(2, 1, 0.01, mode);
    const auto value_of = [&ctx](const CMat& p) { return subproblem_value(p, ctx).value; };
    const SubproblemResult sol = solve_subproblem(start, ctx, EgParams{}, 1e-6, 100000, value_of);
    const SubproblemValue v = subproblem_value(sol.point.primal.precoders, ctx);
    const RandomSearchResult best = subproblem_random_search(ctx, 100000, rng.engine());
    worst_margin = std::min(worst_margin, v.value - best.value);
    worst_violation = std::max(worst_violation, v.violation);
  }
  const bool sub_ok = worst_margin >= -1e-2 && worst_violation <= 1e-3;
  res.pass = saddle_ok && sub_ok;
  res.detail = "bilinear residual " + sci(free_run.residual) + " after " + std::to_string(free_run.steps) +
               " steps (distance to origin " + sci(dist) + "), with z >= 0 residual " + sci(ray_run.residual) +
               " (distance to saddle ray " + sci(ray_dist) + "), min EG - oracle " + sci(worst_margin) + ", max EG violation " + sci(worst_violation);
  return finish(res, t0, 0.0);
}

std::vector<CheckResult> run_oracle_suite() {
  return {check_fp_tightness(), check_gradients(), check_fim(), check_energy(), check_extragradient()};
}

std::string format_check(const CheckResult& r) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.2f", r.seconds);
  return std::string(r.pass ? "PASS" : "FAIL") + " " + std::to_string(r.id) + " " + r.name + ": " + r.detail + " (" +
         secs + " s)";
}

}  // namespace iscap::oracle
