// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "iscap/scenario.hpp"
#include "iscap/types.hpp"

namespace iscap {

/// ULA steering vectors with half-wavelength spacing and symmetric element
/// indices, plus their derivatives with respect to the angle.
struct SteeringPair {
  CVec a_tx;
  CVec a_rx;
  CVec da_tx;
  CVec da_rx;
};

SteeringPair steering(double theta, int n_tx, int n_rx);

/// Echo geometry of one scenario: A = a_r a_t^H and its angle derivative
/// dA = da_r a_t^H + a_r da_t^H, assembled as full matrices.
class SensingModel {
 public:
  explicit SensingModel(const Scenario& s);

  const CMat& a_mat() const { return a_mat_; }
  const CMat& da_mat() const { return da_mat_; }
  double kappa() const { return kappa_; }
  cplx alpha() const { return alpha_; }

  /// FIM over (theta, Re alpha, Im alpha) for transmit covariance P P^H.
  Mat3 fim(const CMat& precoders) const;

 private:
  CMat a_mat_;
  CMat da_mat_;
  double kappa_;
  cplx alpha_;
};

struct FimBundle {
  Mat3 f;
  CMat a_mat;
  CMat da_mat;
  double kappa = 0.0;
  cplx alpha;
  CMat r_x;
};

FimBundle fim(const CMat& precoders, const Scenario& s);

/// True when |det F| <= 1e-12 ||F||_F^3; such an F is treated as singular.
bool fim_is_singular(const Mat3& f);

/// tr(F^-1) by closed-form adjugate inversion. Throws SingularFim.
double crb_trace(const Mat3& f);
inline double crb_trace(const FimBundle& b) { return crb_trace(b.f); }

/// Closed-form 3x3 inverse. Throws SingularFim.
Mat3 inverse3(const Mat3& f);

/// Quantities of the CRB linearisation around an anchor precoder.
struct SurrogateBundle {
  Mat3 phi;         // F^-2
  CMat b_mat;       // gradient of -tr(F^-1) with respect to R_x
  CMat lambda_mat;  // zeta I + (B + B^H)/2, Hermitian PSD
  double zeta = 0.0;
};

/// zeta is the smallest shift making Lambda PSD, plus psd_margin.
SurrogateBundle surrogate_matrices(const FimBundle& bundle, double psd_margin);

/// 2 Re tr(P_anchor P^H Lambda), without the tradeoff weight.
double surrogate_sensing_term(const CMat& precoders, const CMat& anchor, const SurrogateBundle& surrogate);

}  // namespace iscap
