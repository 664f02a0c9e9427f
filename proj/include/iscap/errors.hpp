// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace iscap {

/// Base class for every error raised by the library. kind() is a stable
/// machine-readable tag used by the CLI error line.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

#define ISCAP_DEFINE_ERROR(Name)                                 \
  class Name : public Error {                                    \
   public:                                                       \
    using Error::Error;                                          \
    const char* kind() const noexcept override { return #Name; } \
  };

ISCAP_DEFINE_ERROR(ConfigError)
ISCAP_DEFINE_ERROR(DimensionMismatch)
ISCAP_DEFINE_ERROR(SingularFim)
ISCAP_DEFINE_ERROR(ThresholdUnreachable)
ISCAP_DEFINE_ERROR(ZeroPrecoder)
ISCAP_DEFINE_ERROR(NoFeasibleSample)
ISCAP_DEFINE_ERROR(NonFiniteEvaluation)
ISCAP_DEFINE_ERROR(IoError)

#undef ISCAP_DEFINE_ERROR

}  // namespace iscap
