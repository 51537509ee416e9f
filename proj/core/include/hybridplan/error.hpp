#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hybridplan {

enum class ErrorCode {
  kNotBiconnected,
  kNotPlanar,
  kMismatchedRotation,
  kTooLarge,
  kLeafNotPresent,
  kLeafSetMismatch,
  kNotJoinable,
  kBudgetExceeded,
  kInvalidSolution,
  kInvalidConstraint,
  kMissingSideAnnotation,
  kInvalidSideStructure,
  kNotAClique,
  kFrameNotBiconnected,
  kParseError,
  kInternalError,
};

std::string_view error_code_name(ErrorCode code);

// Every fault raised by the library. Outcomes that are part of an operation's
// contract (Incompatible, Infeasible) are returned as values instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hybridplan
