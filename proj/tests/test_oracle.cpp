// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>

#include "iscap/errors.hpp"
#include "iscap/sensing.hpp"
#include "oracle.hpp"
#include "support.hpp"
#include "verification.hpp"

using namespace iscap;

namespace {

double smooth(const RVec& x) { return std::sin(x(0)) * std::exp(x(1)) + x(2) * x(2) * x(2); }

RVec smooth_gradient(const RVec& x) {
  RVec g(3);
  g << std::cos(x(0)) * std::exp(x(1)), std::sin(x(0)) * std::exp(x(1)), 3.0 * x(2) * x(2);
  return g;
}

// K = 1, N_t = 1, no ER, no sensing weight, anchored at the full-power
// private beam: the subproblem optimum is ln(1 + |h|^2 P_t / sigma^2).
SubproblemContext scalar_toy(cplx h, double power, double noise) {
  Scenario s;
  s.ir_channels = CMat::Constant(1, 1, h);
  s.er_channels = CMat::Zero(1, 0);
  s.noise_comm = RVec::Constant(1, noise);
  s.noise_sense = 1.0;
  s.n_rx = 1;
  CMat anchor = CMat::Zero(1, 2);
  anchor(0, 1) = std::sqrt(power) * h / std::abs(h);
  return make_context(s, update_aux(anchor, s), anchor, CMat::Identity(1, 1), RVec::Zero(0), 0.0, power,
                      AccessMode::rsma);
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("finite differences of simple functions") {
    test::Rng rng(61);
    RVec x(5);
    for (int i = 0; i < 5; ++i) x(i) = rng.normal();
    const RVec g = oracle::fd_gradient([](const RVec& y) { return y.squaredNorm(); }, x);
    CHECK((g - 2.0 * x).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(oracle::fd_gradient([](const RVec&) { return 4.0; }, x).isZero(0.0));
  }

  TEST_CASE("central differences are second order") {
    const RVec x = (RVec(3) << 0.4, -0.3, 0.8).finished();
    const RVec exact = smooth_gradient(x);
    const double e1 = (oracle::fd_gradient(smooth, x, {1e-2, 1e-5}) - exact).norm();
    const double e2 = (oracle::fd_gradient(smooth, x, {5e-3, 1e-5}) - exact).norm();
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  }

  TEST_CASE("finite difference errors") {
    const RVec x = RVec::Zero(2);
    CHECK_THROWS_AS(oracle::fd_gradient(smooth, x, {0.0, 1e-5}), ConfigError);
    CHECK_THROWS_AS(oracle::fd_gradient(smooth, x, {1e-6, -1.0}), ConfigError);
    const auto nan_fn = [](const RVec& y) { return y(0) > 0.0 ? std::numeric_limits<double>::quiet_NaN() : 0.0; };
    CHECK_THROWS_AS(oracle::fd_gradient(nan_fn, x), NonFiniteEvaluation);
  }

  TEST_CASE("relative error helper") {
    const RVec a = (RVec(2) << 1.0, 100.0).finished();
    const RVec b = (RVec(2) << 1.1, 100.0).finished();
    CHECK(oracle::max_rel_error(a, b) == doctest::Approx(0.1 / 1.1));
    CHECK(oracle::max_rel_error(RVec::Zero(2), RVec::Constant(2, 1e-12), 1e-8) == doctest::Approx(1e-4));
  }

  TEST_CASE("definition-level FIM examples") {
    test::Rng rng(62);
    Scenario s = test::random_scenario(rng, 3, 2, 0, 3);
    CHECK(oracle::fim_by_definition(CMat::Zero(3, 3), s).isZero(0.0));
    Scenario single = test::random_scenario(rng, 1, 2, 0, 1);
    CHECK(oracle::fim_by_definition(rng.cmat(1, 3), single)(0, 0) == 0.0);
    for (int trial = 0; trial < 100; ++trial) {
      s = test::random_scenario(rng, 1 + trial % 4, 2, 0, 1 + (trial / 4) % 4);
      const CMat p = rng.cmat(s.n_tx(), 3);
      const Mat3 f = fim(p, s).f;
      const Mat3 d = oracle::fim_by_definition(p, s);
      CHECK((f - d).norm() <= 1e-9 * std::max(d.norm(), 1e-300));
    }
  }

  TEST_CASE("cofactor inverse and trace product") {
    const Mat3 f = (Mat3() << 4, 1, 0, 1, 3, 1, 0, 1, 2).finished();
    CHECK((oracle::inverse_by_cofactors(f) * f - Mat3::Identity()).norm() < 1e-14);
    CHECK(oracle::trace_product(f, Mat3::Identity()) == 9.0);
    CHECK_THROWS_AS(oracle::inverse_by_cofactors(Mat3::Zero()), SingularFim);
  }

  TEST_CASE("loop routes agree with closed forms") {
    CMat p = CMat::Zero(2, 2);
    p(0, 0) = cplx(3.0, 4.0);
    CHECK(oracle::power_by_loops(p) == 25.0);
    test::Rng rng(63);
    Scenario s = test::random_scenario(rng, 2, 1, 0);
    CMat q = CMat::Zero(2, 2);
    q.col(1) = s.ir_channels.col(0);
    const auto [gc, gp] = oracle::sinr_by_loops(q, s);
    CHECK(gc(0) == 0.0);
    CHECK(gp(0) == doctest::Approx(std::pow(s.ir_channels.col(0).squaredNorm(), 2)).epsilon(1e-13));
  }

  TEST_CASE("max-min ER power") {
    test::Rng rng(64);
    const CMat g1 = rng.cmat(3, 1);
    CHECK(oracle::max_min_er_power(g1, 2.0) == doctest::Approx(2.0 * g1.squaredNorm()).epsilon(1e-12));
    CHECK(std::isinf(oracle::max_min_er_power(CMat::Zero(3, 0), 1.0)));
    CMat two(2, 2);
    two << 1.0, 0.0, 0.0, 1.0;  // orthogonal unit channels: half the power each
    CHECK(oracle::max_min_er_power(two, 1.0) == doctest::Approx(0.5).epsilon(1e-6));
  }

  TEST_CASE("random search needs a budget") {
    const SubproblemContext ctx = scalar_toy(cplx(0.6, 0.8), 2.0, 1.0);
    CHECK_THROWS_AS(oracle::subproblem_random_search(ctx, 0, 1), NoFeasibleSample);
    test::Rng rng(65);
    const SubproblemContext big = test::random_context(rng, 4, 2, 1, AccessMode::rsma);
    CHECK_THROWS_AS(oracle::subproblem_random_search(big, 10, 1), ConfigError);
  }

  TEST_CASE("scalar toy recovers the full-power matched filter") {
    for (double power : {0.5, 2.0, 10.0}) {
      const cplx h(0.3, -1.1);
      const double noise = 0.7;
      const SubproblemContext ctx = scalar_toy(h, power, noise);
      const double optimum = std::log1p(std::norm(h) * power / noise);
      const oracle::RandomSearchResult r = oracle::subproblem_random_search(ctx, 2000, 7);
      CHECK(std::abs(r.value - optimum) < 1e-3);
      double by_loops = 0.0;
      REQUIRE(oracle::subproblem_objective_by_loops(ctx.anchor, ctx, by_loops));
      CHECK(by_loops == doctest::Approx(optimum).epsilon(1e-10));
      CHECK(subproblem_value(ctx.anchor, ctx).value == doctest::Approx(optimum).epsilon(1e-10));
    }
  }

  TEST_CASE("oracle suite formatting") {
    const oracle::CheckResult pass{3, "fim_equivalence", true, "err 1e-16", 0.25};
    CHECK(oracle::format_check(pass) == "PASS 3 fim_equivalence: err 1e-16 (0.25 s)");
    oracle::CheckResult fail = pass;
    fail.pass = false;
    CHECK(oracle::format_check(fail).rfind("FAIL 3", 0) == 0);
  }
}
