// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace iscap::oracle {

/// Outcome of one oracle check. `detail` carries the measured worst error.
struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Surrogate tightness at the closed-form auxiliaries and the minorant
/// property at random ones (K = N_t = 4).
CheckResult check_fp_tightness(std::uint64_t seed = 1);

/// Every analytic partial of the subproblem Lagrangian against central
/// finite differences, plus the scalar-loop Lagrangian.
CheckResult check_gradients(std::uint64_t seed = 2);

/// Blockwise FIM against the Jacobian definition, and the power scaling of
/// F and of the CRB.
CheckResult check_fim(std::uint64_t seed = 3);

/// Threshold inversion round trip and the first-order minorant of the
/// received power.
CheckResult check_energy(std::uint64_t seed = 4);

/// Extragradient on a bilinear saddle and on tiny subproblems against the
/// random-search oracle.
CheckResult check_extragradient(std::uint64_t seed = 5);

/// All of the above in order.
std::vector<CheckResult> run_oracle_suite();

/// "PASS <id> <name>: <detail> (<seconds> s)" or the FAIL equivalent.
std::string format_check(const CheckResult& r);

}  // namespace iscap::oracle
