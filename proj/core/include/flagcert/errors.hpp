#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flagcert {

enum class ErrorCode {
  SingularInput,
  NoConvergence,
  BadDegree,
  DimensionMismatch,
  DegenerateImage,
  NotInChart,
  InfiniteCrossRatio,
  CoincidentPoints,
  LineInHyperplane,
  InvalidDomain,
  NotInDomain,
  DegenerateLine,
  NotNested,
  NotStrictlyNested,
  BadOrder,
  InvalidGraph,
  MissingDomain,
  EvaluationError,
  BaseFails,
  SynthesisFailed,
  NotCertified,
  InsufficientData,
  GapTooSmall,
  PathNotFound,
  OutOfBall,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace flagcert
