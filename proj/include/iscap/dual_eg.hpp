// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "iscap/fp.hpp"
#include "iscap/rsma.hpp"
#include "iscap/scenario.hpp"
#include "iscap/types.hpp"

namespace iscap {

/// Multipliers of the convex subproblem: beta (r <= c_k + g_pk), rho
/// (sum c <= g_ck), mu (c >= 0), omega (power budget), eta (linearised EH).
struct DualState {
  RVec beta;
  RVec rho;
  RVec mu;
  double omega = 0.0;
  RVec eta;

  /// beta = 1/K, everything else `init`. In SDMA mode rho and mu are zero.
  static DualState initial(int n_users, int n_ers, double init, AccessMode mode);
};

struct VIPoint {
  PrecoderState primal;
  DualState dual;
};

/// Offsets of the stacked real vector
/// [Re p_c, Im p_c, Re p_1..Re p_K, Im p_1..Im p_K, c, r, beta, rho, mu, omega, eta].
struct ViLayout {
  int n_tx = 0;
  int n_users = 0;
  int n_ers = 0;

  Eigen::Index common_re() const { return 0; }
  Eigen::Index common_im() const { return n_tx; }
  Eigen::Index private_re() const { return 2 * n_tx; }
  Eigen::Index private_im() const { return 2 * n_tx + n_tx * n_users; }
  Eigen::Index alloc() const { return 2 * n_tx * (n_users + 1); }
  Eigen::Index mmf() const { return alloc() + n_users; }
  Eigen::Index beta() const { return mmf() + 1; }
  Eigen::Index rho() const { return beta() + n_users; }
  Eigen::Index mu() const { return rho() + n_users; }
  Eigen::Index omega() const { return mu() + n_users; }
  Eigen::Index eta() const { return omega() + 1; }
  Eigen::Index size() const { return eta() + n_ers; }
  Eigen::Index primal_size() const { return beta(); }
};

RVec stack(const VIPoint& point);
VIPoint unstack(const RVec& x, const ViLayout& layout);

/// Everything that stays frozen while one subproblem is solved: FP
/// auxiliaries, the linearisation anchor, Lambda and the EH targets.
struct SubproblemContext {
  CMat ir_channels;
  RVec noise_comm;
  CMat er_channels;
  AuxState aux;
  CMat anchor;
  CMat lambda_mat;
  RVec eh_targets;  // received-power targets (already inverted)
  double tradeoff = 0.0;
  double power_budget = 1.0;
  AccessMode mode = AccessMode::rsma;

  ViLayout layout() const;
};

SubproblemContext make_context(const Scenario& s, const AuxState& aux, const CMat& anchor, const CMat& lambda_mat,
                               const RVec& eh_targets, double tradeoff, double power_budget, AccessMode mode);

/// Evaluates the subproblem Lagrangian and its VI map on stacked points.
/// Buffers are reused across calls, so one instance must not be shared
/// between threads.
class SubproblemOperator {
 public:
  explicit SubproblemOperator(const SubproblemContext& ctx);

  const ViLayout& layout() const { return layout_; }
  const SubproblemContext& context() const { return ctx_; }

  double lagrangian(const RVec& x);
  /// h(x) = [-dL/dy, dL/dz] in the stacking layout.
  void apply(const RVec& x, RVec& h);
  /// Clips multipliers at zero and pins the SDMA-disabled coordinates.
  void project(RVec& x) const;

  /// g_{p,k} and g_{c,k} at the primal part of x.
  void surrogate_rates(const RVec& x, RVec& g_private, RVec& g_common);
  /// Linearised EH constraint values U-sum - target at the primal part of x.
  RVec eh_values(const RVec& x);

 private:
  void load(const RVec& x);
  void rates();

  const SubproblemContext& ctx_;
  ViLayout layout_;
  CMat sensing_dir_;  // Lambda * anchor
  CMat er_anchor_;    // G^H anchor
  RVec er_anchor_power_;
  RVec sqrt_c_;       // sqrt(1 + theta_c)
  RVec sqrt_p_;       // sqrt(1 + theta_p)
  RVec j_c_;
  RVec j_p_;

  CMat p_;
  CMat inner_;  // H^H P
  RMat gains_;
  CMat er_inner_;
  RVec g_private_;
  RVec g_common_;
  CMat mix_;
  CMat dp_;
};

double lagrangian_value(const VIPoint& point, const SubproblemContext& ctx);

/// dL/dp* for one column (0 = common, k + 1 = private k).
CVec grad_p(const VIPoint& point, const SubproblemContext& ctx, int column);

struct ScalarGradients {
  RVec dc;
  double dr = 0.0;
  DualState dz;
};

ScalarGradients grad_scalars(const VIPoint& point, const SubproblemContext& ctx);

RVec vi_map(const VIPoint& point, const SubproblemContext& ctx);

struct EgParams {
  double sigma_cap = 0.1;
  double tau = 0.9;
};

struct EgStepInfo {
  double sigma_used = 0.0;
  double residual = 0.0;
  bool degenerate = false;  // h(x) == h(x_bar); sigma fell back to the cap
};

/// Prediction-correction extragradient with the adaptive step
/// sigma_n = min(tau ||x - x_bar|| / ||h(x) - h(x_bar)||, sigma_cap).
/// The prediction first tries the previous iteration's sigma and is redone
/// with sigma_n while that trial step violates the rule.
///
/// Op needs apply(const RVec&, RVec&) and project(RVec&).
template <class Op>
class Extragradient {
 public:
  Extragradient(Op& op, EgParams params) : op_(op), params_(params), sigma_(params.sigma_cap) {}

  double sigma() const { return sigma_; }
  void set_sigma(double sigma) { sigma_ = sigma; }

  EgStepInfo step(RVec& x) {
    op_.apply(x, hx_);
    EgStepInfo info;
    double trial = sigma_;
    for (int attempt = 0;; ++attempt) {
      x_bar_ = x - trial * hx_;
      op_.project(x_bar_);
      op_.apply(x_bar_, h_bar_);
      const double dh = (hx_ - h_bar_).norm();
      info.degenerate = !(dh > 0.0);
      info.sigma_used = info.degenerate ? params_.sigma_cap
                                        : std::min(params_.tau * (x - x_bar_).norm() / dh, params_.sigma_cap);
      // The rule must also hold for the prediction step; otherwise predict
      // again with the smaller step.
      if (info.sigma_used >= trial || attempt == kMaxRetries) break;
      trial = info.sigma_used;
    }
    x_next_ = x - info.sigma_used * h_bar_;
    op_.project(x_next_);
    info.residual = (x_next_ - x).norm();
    x.swap(x_next_);
    sigma_ = info.sigma_used;
    return info;
  }

 private:
  static constexpr int kMaxRetries = 30;

  Op& op_;
  EgParams params_;
  double sigma_;
  RVec hx_, x_bar_, h_bar_, x_next_;
};

struct EgStepResult {
  VIPoint next;
  double sigma_used = 0.0;
  double residual = 0.0;
  bool degenerate = false;
};

EgStepResult eg_step(const VIPoint& x, const SubproblemContext& ctx, double sigma_prev, const EgParams& params);

struct InnerTraceRow {
  int iteration = 0;
  double objective = 0.0;
  double residual = 0.0;
  double sigma = 0.0;
};

struct SubproblemResult {
  VIPoint point;
  int iterations = 0;
  bool hit_cap = false;
  double objective = 0.0;
  std::vector<InnerTraceRow> trace;
};

using PrecoderFunction = std::function<double(const CMat&)>;

/// Iterates eg_step until |obj(P_n) - obj(P_{n-1})| < eps while
/// gap(P_n) <= eps, or until max_iters. `objective` maps a precoder matrix
/// to obj(P). An empty `gap` uses subproblem_value(P, ctx).violation.
SubproblemResult solve_subproblem(const VIPoint& start, const SubproblemContext& ctx, const EgParams& params,
                                  double eps, int max_iters, const PrecoderFunction& objective,
                                  const PrecoderFunction& gap = {}, bool keep_trace = false);

/// Subproblem objective r* + tradeoff * 2Re tr(P_anchor P^H Lambda) with the
/// best c and r for P, and the largest violation of the subproblem
/// constraints at P (power relative to the budget, EH relative to targets).
struct SubproblemValue {
  double value = 0.0;
  double violation = 0.0;
};

SubproblemValue subproblem_value(const CMat& precoders, const SubproblemContext& ctx);

}  // namespace iscap
