#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace quanta {

enum class ErrorCode {
  InvalidArgument,
  Schema,
  NonDeterministic,
  NotDualizable,
  EmptyAfterFilter,
  WidthExceeded,
  NotIrreducible,
  SingularSystem,
  AllSilentEndScc,
  NoAcceptingPath,
  NotAlmostSureAccepting,
  NotAlmostSurelyTerminating,
  RejectionMassPositive,
  SumUnboundedBelow,
  OpenProblem,
  UndefinedExpected,
  DepthCap,
  ResourceLimit,
};

/// Stable machine-readable tag, e.g. "sum-unbounded-below".
std::string_view error_tag(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace quanta
