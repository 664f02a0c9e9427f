// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iscap/rsma.hpp"
#include "iscap/scenario.hpp"
#include "iscap/types.hpp"

namespace iscap {

/// Constraint tolerance a converged run must meet (see FeasibilityReport).
inline constexpr double kFeasibilityTol = 1e-3;

struct MiddleTraceRow {
  int outer = 0;
  int middle = 0;
  int inner_iterations = 0;
  bool inner_hit_cap = false;
  double objective = 0.0;  // f2 after renormalisation
};

/// Wall-clock seconds per phase. `inner` covers the EG iterations only.
struct PhaseTimes {
  double setup = 0.0;
  double aux = 0.0;
  double surrogate = 0.0;
  double inner = 0.0;
  double total = 0.0;
};

struct RunRecord {
  AccessMode mode = AccessMode::rsma;
  std::uint64_t seed = 0;      // scenario seed offset
  std::uint64_t rng_seed = 0;  // config base seed

  std::vector<double> outer_trace;  // f1, starting with the initial point
  std::vector<MiddleTraceRow> middle_trace;

  PrecoderState state;
  RateReport rates;
  double crb = 0.0;
  double objective = 0.0;
  FeasibilityReport feasibility;
  FeasibilityReport initial_feasibility;

  PhaseTimes times;
  int outer_iterations = 0;
  int middle_iterations = 0;  // summed over outer iterations
  int inner_iterations = 0;   // summed over all subproblems
  int inner_cap_hits = 0;
  int middle_cap_hits = 0;
  // Outer loop stopped on tol_outer within max_outer.
  bool tolerance_reached = false;
  // tolerance_reached and the final state is feasible to within
  // kFeasibilityTol.
  bool converged = false;

  double seconds_per_inner_iteration() const;
};

/// Matched filters p_k ~ h_k and p_c ~ sum_k h_k with equal power per
/// active stream and tr(PP^H) = power. SDMA leaves p_c at zero. c = 0, r = 0.
PrecoderState init_precoder(const Scenario& s, double power, AccessMode mode);

/// sqrt(power) P / ||P||_F. Throws ZeroPrecoder.
CMat renormalize_power(const CMat& precoders, double power);
PrecoderState renormalize_power(const PrecoderState& p, double power);

/// Rescaled copy of a scenario on which the optimizer works: unit power
/// budget, unit received-power targets and the same rates, CRB and obj(P)
/// for P / sqrt(power). An ER with a zero target keeps the power scaling only.
Scenario normalized_scenario(const Scenario& s, double power, const RVec& received_targets);

/// The three nested loops: FP auxiliaries (outer), SCA anchors (middle) and
/// the extragradient subproblem solver (inner). Throws SingularFim when the
/// sensing linearisation cannot be built.
RunRecord run(const Scenario& s, const SystemConfig& cfg, AccessMode mode);

}  // namespace iscap
