// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

#include <Eigen/Dense>

namespace iscap {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2 = 0.69314718055994530942;

/// Multiple-access scheme. SDMA is RSMA with the common stream switched off.
enum class AccessMode { rsma, sdma };

inline const char* to_string(AccessMode m) { return m == AccessMode::rsma ? "rsma" : "sdma"; }

}  // namespace iscap
