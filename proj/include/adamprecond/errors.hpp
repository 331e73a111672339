#pragma once

#include <stdexcept>
#include <string>

namespace adamprecond {

enum class ErrorKind {
  NonConvergence,
  SingularMatrix,
  BadSpectrum,
  ConstructionFailure,
  SingularDraw,
  BoundViolation,
  ZeroDenominator,
  NonFinite,
  DegenerateBudget,
  MismatchedSchedule,
  NotDiagonal,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  // true for failures the CLI reports with the numerical exit code
  bool numerical() const {
    return kind_ != ErrorKind::InvalidArgument && kind_ != ErrorKind::BoundViolation &&
           kind_ != ErrorKind::BadSpectrum && kind_ != ErrorKind::NotDiagonal &&
           kind_ != ErrorKind::MismatchedSchedule;
  }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace adamprecond
