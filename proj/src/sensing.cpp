// SPDX-License-Identifier: Apache-2.0
#include "iscap/sensing.hpp"

#include <algorithm>
#include <cmath>

#include "iscap/errors.hpp"

namespace iscap {

namespace {

void ula(double theta, int n, CVec& a, CVec& da) {
  a.resize(n);
  da.resize(n);
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  for (int i = 0; i < n; ++i) {
    const double m = i - 0.5 * (n - 1);
    const cplx e = std::polar(1.0, m * kPi * s);
    a(i) = e;
    da(i) = cplx(0.0, m * kPi * c) * e;
  }
}

}  // namespace

SteeringPair steering(double theta, int n_tx, int n_rx) {
  SteeringPair sp;
  ula(theta, n_tx, sp.a_tx, sp.da_tx);
  ula(theta, n_rx, sp.a_rx, sp.da_rx);
  return sp;
}

SensingModel::SensingModel(const Scenario& s) : kappa_(2.0 / s.noise_sense), alpha_(s.alpha) {
  const SteeringPair sp = steering(s.theta, s.n_tx(), s.n_rx);
  a_mat_ = sp.a_rx * sp.a_tx.adjoint();
  da_mat_ = sp.da_rx * sp.a_tx.adjoint() + sp.a_rx * sp.da_tx.adjoint();
}

Mat3 SensingModel::fim(const CMat& precoders) const {
  if (precoders.rows() != a_mat_.cols()) throw DimensionMismatch("precoder rows must equal n_tx");
  const CMat ap = a_mat_ * precoders;
  const CMat dap = da_mat_ * precoders;
  // tr(A R_x dA^H) with R_x = P P^H
  const cplx u = (dap.conjugate().array() * ap.array()).sum();
  const cplx w = std::conj(alpha_) * u;
  Mat3 f = Mat3::Zero();
  f(0, 0) = kappa_ * std::norm(alpha_) * dap.squaredNorm();
  f(0, 1) = f(1, 0) = kappa_ * w.real();
  f(0, 2) = f(2, 0) = -kappa_ * w.imag();
  f(1, 1) = f(2, 2) = kappa_ * ap.squaredNorm();
  return f;
}

FimBundle fim(const CMat& precoders, const Scenario& s) {
  const SensingModel model(s);
  FimBundle b;
  b.f = model.fim(precoders);
  b.a_mat = model.a_mat();
  b.da_mat = model.da_mat();
  b.kappa = model.kappa();
  b.alpha = model.alpha();
  b.r_x = precoders * precoders.adjoint();
  return b;
}

bool fim_is_singular(const Mat3& f) {
  const double scale = f.norm();
  return std::abs(f.determinant()) <= 1e-12 * scale * scale * scale;
}

Mat3 inverse3(const Mat3& f) {
  if (fim_is_singular(f)) throw SingularFim("Fisher information matrix is singular");
  Mat3 adj;
  adj(0, 0) = f(1, 1) * f(2, 2) - f(1, 2) * f(2, 1);
  adj(0, 1) = f(0, 2) * f(2, 1) - f(0, 1) * f(2, 2);
  adj(0, 2) = f(0, 1) * f(1, 2) - f(0, 2) * f(1, 1);
  adj(1, 0) = f(1, 2) * f(2, 0) - f(1, 0) * f(2, 2);
  adj(1, 1) = f(0, 0) * f(2, 2) - f(0, 2) * f(2, 0);
  adj(1, 2) = f(0, 2) * f(1, 0) - f(0, 0) * f(1, 2);
  adj(2, 0) = f(1, 0) * f(2, 1) - f(1, 1) * f(2, 0);
  adj(2, 1) = f(0, 1) * f(2, 0) - f(0, 0) * f(2, 1);
  adj(2, 2) = f(0, 0) * f(1, 1) - f(0, 1) * f(1, 0);
  const double det = f(0, 0) * adj(0, 0) + f(0, 1) * adj(1, 0) + f(0, 2) * adj(2, 0);
  return adj / det;
}

double crb_trace(const Mat3& f) { return inverse3(f).trace(); }

SurrogateBundle surrogate_matrices(const FimBundle& bundle, double psd_margin) {
  const Mat3 inv = inverse3(bundle.f);
  SurrogateBundle s;
  s.phi = inv * inv;
  const CMat& a = bundle.a_mat;
  const CMat& da = bundle.da_mat;
  const cplx cross = 2.0 * cplx(s.phi(0, 1), s.phi(0, 2)) * std::conj(bundle.alpha);
  s.b_mat = bundle.kappa * (s.phi(0, 0) * std::norm(bundle.alpha) * (da.adjoint() * da) +
                            cross * (da.adjoint() * a) + (s.phi(1, 1) + s.phi(2, 2)) * (a.adjoint() * a));
  const CMat herm = 0.5 * (s.b_mat + s.b_mat.adjoint());
  const double min_eig = Eigen::SelfAdjointEigenSolver<CMat>(herm, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  s.zeta = std::max(0.0, -min_eig) + psd_margin;
  s.lambda_mat = herm;
  s.lambda_mat.diagonal().array() += s.zeta;
  return s;
}

double surrogate_sensing_term(const CMat& precoders, const CMat& anchor, const SurrogateBundle& surrogate) {
  if (precoders.rows() != anchor.rows() || precoders.cols() != anchor.cols())
    throw DimensionMismatch("precoder and anchor shapes differ");
  const CMat q = surrogate.lambda_mat * anchor;
  return 2.0 * (precoders.conjugate().array() * q.array()).sum().real();
}

}  // namespace iscap
