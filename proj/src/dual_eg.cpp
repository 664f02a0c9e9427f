// SPDX-License-Identifier: Apache-2.0
#include "iscap/dual_eg.hpp"

#include <cmath>

#include "iscap/errors.hpp"

namespace iscap {

DualState DualState::initial(int n_users, int n_ers, double init, AccessMode mode) {
  const double rs = mode == AccessMode::rsma ? init : 0.0;
  DualState d;
  d.beta = RVec::Constant(n_users, 1.0 / n_users);
  d.rho = RVec::Constant(n_users, rs);
  d.mu = RVec::Constant(n_users, rs);
  d.omega = init;
  d.eta = RVec::Constant(n_ers, init);
  return d;
}

namespace {

void read_precoders(const RVec& x, const ViLayout& lay, CMat& p) {
  const int n = lay.n_tx;
  const int k_users = lay.n_users;
  p.resize(n, k_users + 1);
  for (int i = 0; i < n; ++i) p(i, 0) = cplx(x(lay.common_re() + i), x(lay.common_im() + i));
  for (int k = 0; k < k_users; ++k) {
    for (int i = 0; i < n; ++i) {
      const Eigen::Index off = k * n + i;
      p(i, k + 1) = cplx(x(lay.private_re() + off), x(lay.private_im() + off));
    }
  }
}

void write_precoders(const CMat& p, const ViLayout& lay, RVec& x) {
  const int n = lay.n_tx;
  for (int i = 0; i < n; ++i) {
    x(lay.common_re() + i) = p(i, 0).real();
    x(lay.common_im() + i) = p(i, 0).imag();
  }
  for (int k = 0; k < lay.n_users; ++k) {
    for (int i = 0; i < n; ++i) {
      const Eigen::Index off = k * n + i;
      x(lay.private_re() + off) = p(i, k + 1).real();
      x(lay.private_im() + off) = p(i, k + 1).imag();
    }
  }
}

}  // namespace

RVec stack(const VIPoint& point) {
  ViLayout lay{point.primal.n_tx(), point.primal.n_users(), static_cast<int>(point.dual.eta.size())};
  if (point.primal.common_alloc.size() != lay.n_users || point.dual.beta.size() != lay.n_users ||
      point.dual.rho.size() != lay.n_users || point.dual.mu.size() != lay.n_users)
    throw DimensionMismatch("VI point blocks disagree on K");
  RVec x(lay.size());
  write_precoders(point.primal.precoders, lay, x);
  x.segment(lay.alloc(), lay.n_users) = point.primal.common_alloc;
  x(lay.mmf()) = point.primal.mmf_aux;
  x.segment(lay.beta(), lay.n_users) = point.dual.beta;
  x.segment(lay.rho(), lay.n_users) = point.dual.rho;
  x.segment(lay.mu(), lay.n_users) = point.dual.mu;
  x(lay.omega()) = point.dual.omega;
  x.segment(lay.eta(), lay.n_ers) = point.dual.eta;
  return x;
}

VIPoint unstack(const RVec& x, const ViLayout& lay) {
  if (x.size() != lay.size()) throw DimensionMismatch("stacked vector does not match layout");
  VIPoint point;
  read_precoders(x, lay, point.primal.precoders);
  point.primal.common_alloc = x.segment(lay.alloc(), lay.n_users);
  point.primal.mmf_aux = x(lay.mmf());
  point.dual.beta = x.segment(lay.beta(), lay.n_users);
  point.dual.rho = x.segment(lay.rho(), lay.n_users);
  point.dual.mu = x.segment(lay.mu(), lay.n_users);
  point.dual.omega = x(lay.omega());
  point.dual.eta = x.segment(lay.eta(), lay.n_ers);
  return point;
}

ViLayout SubproblemContext::layout() const {
  return ViLayout{static_cast<int>(ir_channels.rows()), static_cast<int>(ir_channels.cols()),
                  static_cast<int>(er_channels.cols())};
}

SubproblemContext make_context(const Scenario& s, const AuxState& aux, const CMat& anchor, const CMat& lambda_mat,
                               const RVec& eh_targets, double tradeoff, double power_budget, AccessMode mode) {
  const int n = s.n_tx();
  const int k_users = s.n_users();
  if (anchor.rows() != n || anchor.cols() != k_users + 1) throw DimensionMismatch("anchor must be n_tx x (K+1)");
  if (lambda_mat.rows() != n || lambda_mat.cols() != n) throw DimensionMismatch("Lambda must be n_tx x n_tx");
  if (eh_targets.size() != s.n_ers()) throw DimensionMismatch("one EH target per ER");
  if (aux.theta_c.size() != k_users || aux.theta_p.size() != k_users || aux.phi_c.size() != k_users ||
      aux.phi_p.size() != k_users)
    throw DimensionMismatch("auxiliaries must have K entries");
  SubproblemContext ctx;
  ctx.ir_channels = s.ir_channels;
  ctx.noise_comm = s.noise_comm;
  ctx.er_channels = s.er_channels;
  ctx.aux = aux;
  ctx.anchor = anchor;
  ctx.lambda_mat = lambda_mat;
  ctx.eh_targets = eh_targets;
  ctx.tradeoff = tradeoff;
  ctx.power_budget = power_budget;
  ctx.mode = mode;
  return ctx;
}

SubproblemOperator::SubproblemOperator(const SubproblemContext& ctx) : ctx_(ctx), layout_(ctx.layout()) {
  sensing_dir_ = ctx.lambda_mat * ctx.anchor;
  er_anchor_ = ctx.er_channels.adjoint() * ctx.anchor;
  er_anchor_power_ = er_anchor_.cwiseAbs2().rowwise().sum();
  sqrt_c_ = (1.0 + ctx.aux.theta_c.array()).sqrt();
  sqrt_p_ = (1.0 + ctx.aux.theta_p.array()).sqrt();
  j_c_ = ctx.aux.theta_c.array().log1p() - ctx.aux.theta_c.array();
  j_p_ = ctx.aux.theta_p.array().log1p() - ctx.aux.theta_p.array();
}

void SubproblemOperator::load(const RVec& x) {
  if (x.size() != layout_.size()) throw DimensionMismatch("stacked vector does not match layout");
  read_precoders(x, layout_, p_);
}

void SubproblemOperator::rates() {
  const int k_users = layout_.n_users;
  const auto& aux = ctx_.aux;
  inner_.noalias() = ctx_.ir_channels.adjoint() * p_;
  gains_ = inner_.cwiseAbs2();
  er_inner_.noalias() = ctx_.er_channels.adjoint() * p_;
  g_private_.resize(k_users);
  g_common_.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    const double t_p = gains_.row(k).tail(k_users).sum() + ctx_.noise_comm(k);
    const double t_c = t_p + gains_(k, 0);
    g_private_(k) = j_p_(k) + 2.0 * sqrt_p_(k) * std::real(std::conj(aux.phi_p(k)) * inner_(k, k + 1)) -
                    std::norm(aux.phi_p(k)) * t_p;
    g_common_(k) = j_c_(k) + 2.0 * sqrt_c_(k) * std::real(std::conj(aux.phi_c(k)) * inner_(k, 0)) -
                   std::norm(aux.phi_c(k)) * t_c;
  }
}

RVec SubproblemOperator::eh_values(const RVec& x) {
  load(x);
  er_inner_.noalias() = ctx_.er_channels.adjoint() * p_;
  const RVec cross = (er_anchor_.conjugate().array() * er_inner_.array()).real().rowwise().sum();
  return 2.0 * cross - er_anchor_power_ - ctx_.eh_targets;
}

void SubproblemOperator::surrogate_rates(const RVec& x, RVec& g_private, RVec& g_common) {
  load(x);
  rates();
  g_private = g_private_;
  g_common = g_common_;
}

double SubproblemOperator::lagrangian(const RVec& x) {
  load(x);
  rates();
  const ViLayout& lay = layout_;
  const int k_users = lay.n_users;
  const auto c = x.segment(lay.alloc(), k_users);
  const double r = x(lay.mmf());
  const auto beta = x.segment(lay.beta(), k_users);
  const auto rho = x.segment(lay.rho(), k_users);
  const auto mu = x.segment(lay.mu(), k_users);
  const double omega = x(lay.omega());
  const auto eta = x.segment(lay.eta(), lay.n_ers);

  const double sensing = 2.0 * (p_.conjugate().array() * sensing_dir_.array()).sum().real();
  const RVec u = 2.0 * (er_anchor_.conjugate().array() * er_inner_.array()).real().rowwise().sum() -
                 er_anchor_power_.array();
  const double c_sum = c.sum();

  double value = r + ctx_.tradeoff * sensing;
  value -= beta.dot((RVec::Constant(k_users, r) - c - g_private_));
  value -= rho.dot((RVec::Constant(k_users, c_sum) - g_common_));
  value += mu.dot(c);
  value -= omega * (p_.squaredNorm() - ctx_.power_budget);
  value += eta.dot(u - ctx_.eh_targets);
  return value;
}

void SubproblemOperator::apply(const RVec& x, RVec& h) {
  load(x);
  rates();
  const ViLayout& lay = layout_;
  const int k_users = lay.n_users;
  const auto& aux = ctx_.aux;
  const auto c = x.segment(lay.alloc(), k_users);
  const double r = x(lay.mmf());
  const auto beta = x.segment(lay.beta(), k_users);
  const auto rho = x.segment(lay.rho(), k_users);
  const auto mu = x.segment(lay.mu(), k_users);
  const double omega = x(lay.omega());
  const auto eta = x.segment(lay.eta(), lay.n_ers);
  const bool rsma = ctx_.mode == AccessMode::rsma;

  // dL/dP* = lambda Lambda P_t + G diag(eta) G^H P_t - omega P + H mix, where
  // column j of mix holds the per-user weights of h_j.
  mix_.resize(k_users, k_users + 1);
  for (int j = 0; j < k_users; ++j) {
    const double w = beta(j) * std::norm(aux.phi_p(j)) + rho(j) * std::norm(aux.phi_c(j));
    mix_(j, 0) = rho(j) * (sqrt_c_(j) * aux.phi_c(j) - std::norm(aux.phi_c(j)) * inner_(j, 0));
    for (int m = 1; m <= k_users; ++m) mix_(j, m) = -w * inner_(j, m);
    mix_(j, j + 1) += beta(j) * sqrt_p_(j) * aux.phi_p(j);
  }
  dp_ = ctx_.tradeoff * sensing_dir_ - omega * p_;
  dp_.noalias() += ctx_.er_channels * (eta.asDiagonal() * er_anchor_);
  dp_.noalias() += ctx_.ir_channels * mix_;
  if (!rsma) dp_.col(0).setZero();

  h.resize(lay.size());
  // Real-stacked gradient is 2 dL/dp*; primal entries of h are negated.
  write_precoders(-2.0 * dp_, lay, h);

  const double rho_sum = rho.sum();
  h.segment(lay.alloc(), k_users) = -(beta + mu).array() + rho_sum;
  h(lay.mmf()) = -(1.0 - beta.sum());
  h.segment(lay.beta(), k_users) = -(RVec::Constant(k_users, r) - c - g_private_);
  h.segment(lay.rho(), k_users) = -(RVec::Constant(k_users, c.sum()) - g_common_);
  h.segment(lay.mu(), k_users) = c;
  h(lay.omega()) = -(p_.squaredNorm() - ctx_.power_budget);
  const RVec u = 2.0 * (er_anchor_.conjugate().array() * er_inner_.array()).real().rowwise().sum() -
                 er_anchor_power_.array();
  h.segment(lay.eta(), lay.n_ers) = u - ctx_.eh_targets;

  if (!rsma) {
    h.segment(lay.alloc(), k_users).setZero();
    h.segment(lay.rho(), k_users).setZero();
    h.segment(lay.mu(), k_users).setZero();
  }
}

void SubproblemOperator::project(RVec& x) const {
  const ViLayout& lay = layout_;
  auto duals = x.segment(lay.beta(), lay.size() - lay.beta());
  duals = duals.cwiseMax(0.0);
  if (ctx_.mode == AccessMode::sdma) {
    x.segment(lay.common_re(), 2 * lay.n_tx).setZero();
    x.segment(lay.alloc(), lay.n_users).setZero();
    x.segment(lay.rho(), lay.n_users).setZero();
    x.segment(lay.mu(), lay.n_users).setZero();
  }
}

double lagrangian_value(const VIPoint& point, const SubproblemContext& ctx) {
  SubproblemOperator op(ctx);
  return op.lagrangian(stack(point));
}

RVec vi_map(const VIPoint& point, const SubproblemContext& ctx) {
  SubproblemOperator op(ctx);
  RVec h;
  op.apply(stack(point), h);
  return h;
}

CVec grad_p(const VIPoint& point, const SubproblemContext& ctx, int column) {
  const ViLayout lay = ctx.layout();
  if (column < 0 || column > lay.n_users) throw DimensionMismatch("precoder column out of range");
  // The VI map carries -2 dL/dp* in its precoder block. Evaluate without the
  // SDMA mask so the common column is always available.
  SubproblemContext unmasked = ctx;
  unmasked.mode = AccessMode::rsma;
  const RVec h = vi_map(point, unmasked);
  CMat p;
  read_precoders(h, lay, p);
  return -0.5 * p.col(column);
}

ScalarGradients grad_scalars(const VIPoint& point, const SubproblemContext& ctx) {
  SubproblemContext unmasked = ctx;
  unmasked.mode = AccessMode::rsma;
  const RVec h = vi_map(point, unmasked);
  const ViLayout lay = ctx.layout();
  const int k_users = lay.n_users;
  ScalarGradients g;
  g.dc = -h.segment(lay.alloc(), k_users);
  g.dr = -h(lay.mmf());
  g.dz.beta = h.segment(lay.beta(), k_users);
  g.dz.rho = h.segment(lay.rho(), k_users);
  g.dz.mu = h.segment(lay.mu(), k_users);
  g.dz.omega = h(lay.omega());
  g.dz.eta = h.segment(lay.eta(), lay.n_ers);
  return g;
}

EgStepResult eg_step(const VIPoint& x, const SubproblemContext& ctx, double sigma_prev, const EgParams& params) {
  if (!(sigma_prev > 0.0)) throw ConfigError("sigma_prev must be positive");
  SubproblemOperator op(ctx);
  Extragradient<SubproblemOperator> eg(op, params);
  eg.set_sigma(sigma_prev);
  RVec v = stack(x);
  const EgStepInfo info = eg.step(v);
  EgStepResult out;
  out.next = unstack(v, op.layout());
  out.sigma_used = info.sigma_used;
  out.residual = info.residual;
  out.degenerate = info.degenerate;
  return out;
}

SubproblemResult solve_subproblem(const VIPoint& start, const SubproblemContext& ctx, const EgParams& params,
                                  double eps, int max_iters, const PrecoderFunction& objective,
                                  const PrecoderFunction& gap, bool keep_trace) {
  SubproblemOperator op(ctx);
  Extragradient<SubproblemOperator> eg(op, params);
  RVec x = stack(start);
  op.project(x);

  CMat p;
  read_precoders(x, op.layout(), p);
  double f_prev = objective(p);

  SubproblemResult res;
  res.objective = f_prev;
  res.hit_cap = true;
  for (int n = 1; n <= max_iters; ++n) {
    const EgStepInfo info = eg.step(x);
    read_precoders(x, op.layout(), p);
    const double f = objective(p);
    res.iterations = n;
    res.objective = f;
    if (keep_trace) res.trace.push_back({n, f, info.residual, info.sigma_used});
    // obj(P) can stall while the multipliers are still far off, so the
    // current precoder must also be (nearly) feasible.
    if (std::abs(f - f_prev) < eps && (gap ? gap(p) : subproblem_value(p, ctx).violation) <= eps) {
      res.hit_cap = false;
      break;
    }
    f_prev = f;
  }
  if (max_iters <= 0) res.hit_cap = false;
  res.point = unstack(x, op.layout());
  return res;
}

SubproblemValue subproblem_value(const CMat& precoders, const SubproblemContext& ctx) {
  const ViLayout lay = ctx.layout();
  SubproblemOperator op(ctx);
  RVec x = RVec::Zero(lay.size());
  write_precoders(precoders, lay, x);
  RVec g_private, g_common;
  op.surrogate_rates(x, g_private, g_common);

  const bool rsma = ctx.mode == AccessMode::rsma;
  const double capacity = rsma ? g_common.minCoeff() : 0.0;
  const RVec c = optimal_common_allocation(g_private, std::max(capacity, 0.0));

  const CMat dir = ctx.lambda_mat * ctx.anchor;
  SubproblemValue v;
  v.value = (c + g_private).minCoeff() + ctx.tradeoff * 2.0 * (precoders.conjugate().array() * dir.array()).sum().real();

  double viol = std::max(0.0, -capacity);
  if (!rsma && precoders.col(0).squaredNorm() > 0.0) viol = std::max(viol, precoders.col(0).norm());
  viol = std::max(viol, (precoders.squaredNorm() - ctx.power_budget) / ctx.power_budget);
  const RVec eh = op.eh_values(x);
  for (int l = 0; l < lay.n_ers; ++l) {
    const double t = ctx.eh_targets(l);
    viol = std::max(viol, t > 0.0 ? -eh(l) / t : -eh(l));
  }
  v.violation = viol;
  return v;
}

}  // namespace iscap
