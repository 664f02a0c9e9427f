// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "iscap/errors.hpp"
#include "iscap/sensing.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace iscap;

namespace {

Scenario sensing_scenario(test::Rng& rng, int n_tx, int n_rx, double theta, cplx alpha) {
  Scenario s = test::random_scenario(rng, n_tx, 2, 0, n_rx);
  s.theta = theta;
  s.alpha = alpha;
  return s;
}

// 2 Re tr(A B^H C) by explicit loops.
double two_re_trace(const CMat& a, const CMat& b, const CMat& c) {
  cplx acc = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index m = 0; m < c.rows(); ++m) acc += a(i, j) * std::conj(b(m, j)) * c(m, i);
  return 2.0 * acc.real();
}

}  // namespace

TEST_SUITE("sensing") {
  TEST_CASE("steering at broadside") {
    const SteeringPair sp = steering(0.0, 4, 3);
    CHECK(sp.a_tx.isApprox(CVec::Ones(4), 1e-15));
    CHECK(sp.a_rx.isApprox(CVec::Ones(3), 1e-15));
    for (int i = 0; i < 4; ++i) {
      const double m = i - 1.5;
      CHECK(std::abs(sp.da_tx(i) - cplx(0.0, m * kPi)) < 1e-14);
    }
  }

  TEST_CASE("steering entries have unit magnitude and symmetric phases") {
    const SteeringPair sp = steering(0.7, 5, 4);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(sp.a_tx(i)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(sp.a_tx(0) - std::conj(sp.a_tx(4))) < 1e-14);
    CHECK(std::abs(sp.a_tx(2) - 1.0) < 1e-14);
  }

  TEST_CASE("steering derivatives match finite differences") {
    for (double theta : {0.3, -1.1, 0.05}) {
      for (int n : {1, 2, 4, 7}) {
        const SteeringPair sp = steering(theta, n, n);
        const double h = 1e-6;
        const CVec fd = (steering(theta + h, n, n).a_tx - steering(theta - h, n, n).a_tx) / (2.0 * h);
        const double scale = std::max(sp.da_tx.norm(), 1e-8);
        CHECK((fd - sp.da_tx).norm() / scale < 1e-6);
      }
    }
  }

  TEST_CASE("FIM examples") {
    test::Rng rng(21);
    const Scenario s = sensing_scenario(rng, 3, 3, 0.2, cplx(0.8, -0.3));
    CHECK(fim(CMat::Zero(3, 3), s).f.isZero(0.0));

    const Scenario single = sensing_scenario(rng, 1, 1, 0.0, 1.0);
    const Mat3 f1 = fim(rng.cmat(1, 3), single).f;
    CHECK(f1(0, 0) == 0.0);
    CHECK(fim_is_singular(f1));
    CHECK_THROWS_AS(crb_trace(f1), SingularFim);

    const Scenario two = sensing_scenario(rng, 2, 2, 0.0, 1.0);
    const CMat p = rng.cmat(2, 3);
    const Mat3 f2 = fim(p, two).f;
    const Mat3 oracle_f = oracle::fim_by_definition(p, two);
    CHECK((f2 - oracle_f).norm() / oracle_f.norm() < 1e-12);
  }

  TEST_CASE("FIM is symmetric PSD and matches the definition") {
    test::Rng rng(22);
    for (int trial = 0; trial < 50; ++trial) {
      const Scenario s = sensing_scenario(rng, 4, 3, rng.uniform(-1.2, 1.2), rng.cn());
      const CMat p = rng.cmat(4, 3);
      const FimBundle b = fim(p, s);
      CHECK((b.f - b.f.transpose()).norm() == 0.0);
      const auto eig = Eigen::SelfAdjointEigenSolver<Mat3>(b.f).eigenvalues();
      CHECK(eig.minCoeff() >= -1e-10 * eig.maxCoeff());
      CHECK(b.f(0, 0) >= 0.0);
      CHECK((b.r_x - b.r_x.adjoint()).norm() < 1e-13);
      const Mat3 oracle_f = oracle::fim_by_definition(p, s);
      CHECK((b.f - oracle_f).norm() / oracle_f.norm() < 1e-12);
    }
  }

  TEST_CASE("doubling the covariance halves the CRB") {
    test::Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
      const Scenario s = sensing_scenario(rng, 4, 4, rng.uniform(-1.0, 1.0), rng.cn());
      const CMat p = rng.cmat(4, 5);
      const Mat3 f = fim(p, s).f;
      const Mat3 f2 = fim(std::sqrt(2.0) * p, s).f;
      CHECK((f2 - 2.0 * f).norm() / f.norm() < 1e-13);
      CHECK(crb_trace(f) > 0.0);
      CHECK(crb_trace(f2) == doctest::Approx(0.5 * crb_trace(f)).epsilon(1e-12));
    }
  }

  TEST_CASE("CRB trace examples") {
    CHECK(crb_trace(Mat3::Identity()) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(crb_trace(Mat3(Eigen::Vector3d(2.0, 4.0, 4.0).asDiagonal())) == doctest::Approx(1.0).epsilon(1e-15));
    test::Rng rng(24);
    for (int trial = 0; trial < 100; ++trial) {
      RMat m(3, 3);
      for (int i = 0; i < 9; ++i) m(i) = rng.normal();
      const Mat3 f = m * m.transpose() + 0.1 * Mat3::Identity();
      const double expect = oracle::inverse_by_cofactors(f).trace();
      CHECK(std::abs(crb_trace(f) - expect) <= 1e-10 * expect);
      CHECK((inverse3(f) * f - Mat3::Identity()).norm() < 1e-9);
    }
  }

  TEST_CASE("surrogate matrices") {
    FimBundle scalar;
    scalar.f = 3.0 * Mat3::Identity();
    scalar.a_mat = CMat::Ones(2, 2);
    scalar.da_mat = CMat::Zero(2, 2);
    scalar.kappa = 2.0;
    scalar.alpha = 1.0;
    const SurrogateBundle sb = surrogate_matrices(scalar, 1e-8);
    CHECK(sb.phi.isApprox(Mat3::Identity() / 9.0, 1e-15));

    test::Rng rng(25);
    for (int trial = 0; trial < 50; ++trial) {
      const Scenario s = sensing_scenario(rng, 4, 4, rng.uniform(-1.0, 1.0), rng.cn());
      const SurrogateBundle b = surrogate_matrices(fim(rng.cmat(4, 5), s), 1e-8);
      CHECK((b.lambda_mat - b.lambda_mat.adjoint()).norm() < 1e-12 * b.lambda_mat.norm());
      const double min_eig =
          Eigen::SelfAdjointEigenSolver<CMat>(b.lambda_mat, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
      CHECK(min_eig >= 1e-8 - 1e-12 * b.lambda_mat.norm());
      CHECK((b.phi - b.phi.transpose()).norm() < 1e-12 * b.phi.norm());
      CHECK(b.zeta >= 1e-8);
    }
  }

  TEST_CASE("surrogate sensing term") {
    test::Rng rng(26);
    const Scenario s = sensing_scenario(rng, 3, 4, 0.4, rng.cn());
    const CMat anchor = rng.cmat(3, 3);
    const SurrogateBundle b = surrogate_matrices(fim(anchor, s), 1e-8);
    CHECK(surrogate_sensing_term(CMat::Zero(3, 3), anchor, b) == 0.0);
    const double at_anchor = surrogate_sensing_term(anchor, anchor, b);
    CHECK(at_anchor >= 0.0);
    const CMat quad = anchor.adjoint() * b.lambda_mat * anchor;
    CHECK(at_anchor == doctest::Approx(2.0 * quad.trace().real()).epsilon(1e-12));
    // Tightness of the linearisation at the anchor.
    const double t = quad.trace().real();
    CHECK(std::abs(t - (at_anchor - t)) <= 1e-12 * t);
    for (int trial = 0; trial < 20; ++trial) {
      const CMat p = rng.cmat(3, 3);
      const double loops = two_re_trace(anchor, p, b.lambda_mat);
      CHECK(std::abs(surrogate_sensing_term(p, anchor, b) - loops) < 1e-10 * std::max(1.0, std::abs(loops)));
    }
    CHECK_THROWS_AS(surrogate_sensing_term(rng.cmat(3, 2), anchor, b), DimensionMismatch);
  }

  TEST_CASE("surrogate slope agrees with the CRB slope along power-preserving directions") {
    // The zeta I shift contributes 2 zeta Re tr(P_anchor D^H), which vanishes
    // when D is tangent to the power sphere; there the surrogate slope must
    // equal -d tr(F^-1)/dt exactly, and in particular have the same sign.
    test::Rng rng(27);
    const Scenario s = sensing_scenario(rng, 4, 4, 0.3, cplx(0.9, 0.2));
    const CMat anchor = rng.cmat(4, 5);
    const SurrogateBundle b = surrogate_matrices(fim(anchor, s), 1e-8);
    const auto crb_along = [&](const CMat& d, double t) { return crb_trace(fim(anchor + t * d, s)); };
    int agree = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      CMat d = rng.cmat(4, 5);
      const double along = (anchor.conjugate().array() * d.array()).sum().real() / anchor.squaredNorm();
      d -= along * anchor;
      const double h = 1e-6;
      const double crb_slope = -(crb_along(d, h) - crb_along(d, -h)) / (2.0 * h);
      const double sur_slope = surrogate_sensing_term(d, anchor, b);
      if ((crb_slope > 0.0) == (sur_slope > 0.0)) ++agree;
      worst = std::max(worst, std::abs(crb_slope - sur_slope) / std::max(std::abs(sur_slope), 1e-3 * b.lambda_mat.norm()));
    }
    CHECK(agree == 100);
    CHECK(worst < 1e-5);
  }
}
