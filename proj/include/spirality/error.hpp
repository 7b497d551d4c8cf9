#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spirality {

enum class ErrorCode {
  RankDeficient,
  ParallelSlopes,
  NotPrimitive,
  NotUnimodular,
  InvalidGraph,
  UnknownCircle,
  NotAClosedPath,
  MissingData,
  NotACovering,
  HypothesesViolated,
  MissingDegeneracySlope,
  IncompatiblePair,
  EdgeConditionUnsatisfiable,
  InconsistentConstants,
  InternalInconsistency,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ParallelSlopes: return "ParallelSlopes";
    case ErrorCode::NotPrimitive: return "NotPrimitive";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::UnknownCircle: return "UnknownCircle";
    case ErrorCode::NotAClosedPath: return "NotAClosedPath";
    case ErrorCode::MissingData: return "MissingData";
    case ErrorCode::NotACovering: return "NotACovering";
    case ErrorCode::HypothesesViolated: return "HypothesesViolated";
    case ErrorCode::MissingDegeneracySlope: return "MissingDegeneracySlope";
    case ErrorCode::IncompatiblePair: return "IncompatiblePair";
    case ErrorCode::EdgeConditionUnsatisfiable: return "EdgeConditionUnsatisfiable";
    case ErrorCode::InconsistentConstants: return "InconsistentConstants";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace spirality
