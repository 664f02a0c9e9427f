// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations for tests and the `verify` command.
// Everything here is written with explicit scalar loops or from first
// principles and deliberately shares no arithmetic with the library code it
// checks.
#pragma once

#include <cstdint>
#include <functional>

#include "iscap/dual_eg.hpp"
#include "iscap/scenario.hpp"
#include "iscap/types.hpp"

namespace iscap::oracle {

struct FdSpec {
  double step = 1e-6;
  double rel_tol = 1e-5;
};

using ScalarFunction = std::function<double(const RVec&)>;

/// Central differences per coordinate. Throws ConfigError for a bad spec and
/// NonFiniteEvaluation when f is not finite at a probe point.
RVec fd_gradient(const ScalarFunction& f, const RVec& x, const FdSpec& spec = {});

/// |a - b| / max(|a|, |b|, floor), elementwise maximum over two vectors.
double max_rel_error(const RVec& a, const RVec& b, double floor = 1e-8);

/// SINRs by nested loops: first = common, second = private.
std::pair<RVec, RVec> sinr_by_loops(const CMat& precoders, const Scenario& s);

/// Sum of squared entry magnitudes.
double power_by_loops(const CMat& precoders);

/// Quadratic-transform auxiliary phi by loops, for theta given.
std::pair<CVec, CVec> phi_by_loops(const CMat& precoders, const Scenario& s, const RVec& theta_c,
                                   const RVec& theta_p);

/// Subproblem Lagrangian evaluated term by term with scalar loops.
double lagrangian_by_loops(const VIPoint& point, const SubproblemContext& ctx);

/// FIM from the Jacobian of the echo with respect to (theta, Re alpha, Im
/// alpha), one precoder column at a time.
Mat3 fim_by_definition(const CMat& precoders, const Scenario& s);

/// Inverse by cofactor expansion. Throws SingularFim when det == 0.
Mat3 inverse_by_cofactors(const Mat3& f);

/// tr(A B) by a double loop.
double trace_product(const Mat3& a, const Mat3& b);

/// max over tr(PP^H) = power of min_l |g_l^H P|^2 for at most two ERs, via
/// the dual min over mu of power * lambda_max(mu g1 g1^H + (1 - mu) g2 g2^H)
/// (golden-section search on the convex dual function).
double max_min_er_power(const CMat& er_channels, double power);

struct RandomSearchResult {
  CMat precoders;
  RVec common_alloc;
  double mmf_aux = 0.0;
  double value = 0.0;  // r + tradeoff * 2Re tr(P_anchor P^H Lambda)
  int feasible_samples = 0;
};

/// Value of the subproblem at P with the best (c, r), computed by bisection
/// on the level r. Returns false when P is infeasible for the subproblem.
bool subproblem_objective_by_loops(const CMat& precoders, const SubproblemContext& ctx, double& value,
                                   RVec* common_alloc = nullptr, double* mmf_aux = nullptr);

/// Samples `budget` precoders on the power sphere, keeps the feasible ones
/// and refines the best by coordinate descent inside the power ball. Only
/// meant for K <= 2, N_t <= 3, L <= 1. Throws NoFeasibleSample.
RandomSearchResult subproblem_random_search(const SubproblemContext& ctx, int budget, std::uint64_t seed);

}  // namespace iscap::oracle
