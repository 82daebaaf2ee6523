// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trendvar {

enum class ErrorKind {
  Usage,
  InvalidArgument,
  // data problems
  Io,
  ParseError,
  GapError,
  EmptyData,
  NonNumeric,
  LengthMismatch,
  TrendLengthMismatch,
  HorizonZero,
  ZeroActual,
  DegenerateScale,
  EmptySelection,
  // numerical problems
  NotPositiveDefinite,
  NearUnitRoot,
  SingularScale,
  ConvergenceFailure,
  DivergedLoss,
};

std::string_view to_string(ErrorKind kind);

/// Process exit class for an error: 1 usage, 2 data, 3 numeric.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace trendvar
