#include "adamprecond/errors.hpp"

namespace adamprecond {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::BadSpectrum: return "BadSpectrum";
    case ErrorKind::ConstructionFailure: return "ConstructionFailure";
    case ErrorKind::SingularDraw: return "SingularDraw";
    case ErrorKind::BoundViolation: return "BoundViolation";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DegenerateBudget: return "DegenerateBudget";
    case ErrorKind::MismatchedSchedule: return "MismatchedSchedule";
    case ErrorKind::NotDiagonal: return "NotDiagonal";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace adamprecond
