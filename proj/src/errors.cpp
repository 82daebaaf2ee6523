// SPDX-License-Identifier: Apache-2.0
#include "trendvar/errors.hpp"

namespace trendvar {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "Usage";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::GapError: return "GapError";
    case ErrorKind::EmptyData: return "EmptyData";
    case ErrorKind::NonNumeric: return "NonNumeric";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::TrendLengthMismatch: return "TrendLengthMismatch";
    case ErrorKind::HorizonZero: return "HorizonZero";
    case ErrorKind::ZeroActual: return "ZeroActual";
    case ErrorKind::DegenerateScale: return "DegenerateScale";
    case ErrorKind::EmptySelection: return "EmptySelection";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NearUnitRoot: return "NearUnitRoot";
    case ErrorKind::SingularScale: return "SingularScale";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::DivergedLoss: return "DivergedLoss";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
    case ErrorKind::InvalidArgument:
      return 1;
    case ErrorKind::Io:
    case ErrorKind::ParseError:
    case ErrorKind::GapError:
    case ErrorKind::EmptyData:
    case ErrorKind::NonNumeric:
    case ErrorKind::LengthMismatch:
    case ErrorKind::TrendLengthMismatch:
    case ErrorKind::HorizonZero:
    case ErrorKind::ZeroActual:
    case ErrorKind::DegenerateScale:
    case ErrorKind::EmptySelection:
      return 2;
    case ErrorKind::NotPositiveDefinite:
    case ErrorKind::NearUnitRoot:
    case ErrorKind::SingularScale:
    case ErrorKind::ConvergenceFailure:
    case ErrorKind::DivergedLoss:
      return 3;
  }
  return 1;
}

}  // namespace trendvar
