#include "quanta/error.hpp"

namespace quanta {

std::string_view error_tag(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Schema: return "schema";
    case ErrorCode::NonDeterministic: return "undecidable";
    case ErrorCode::NotDualizable: return "not-dualizable";
    case ErrorCode::EmptyAfterFilter: return "empty-after-filter";
    case ErrorCode::WidthExceeded: return "width-exceeded";
    case ErrorCode::NotIrreducible: return "not-irreducible";
    case ErrorCode::SingularSystem: return "singular-system";
    case ErrorCode::AllSilentEndScc: return "all-silent-end-scc";
    case ErrorCode::NoAcceptingPath: return "no-accepting-path";
    case ErrorCode::NotAlmostSureAccepting: return "not-almost-sure-accepting";
    case ErrorCode::NotAlmostSurelyTerminating: return "not-almost-surely-terminating";
    case ErrorCode::RejectionMassPositive: return "rejection-mass-positive";
    case ErrorCode::SumUnboundedBelow: return "sum-unbounded-below";
    case ErrorCode::OpenProblem: return "open-problem";
    case ErrorCode::UndefinedExpected: return "undefined-expected";
    case ErrorCode::DepthCap: return "depth-cap";
    case ErrorCode::ResourceLimit: return "resource-limit";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

}  // namespace quanta
