#include "flagcert/errors.hpp"

namespace flagcert {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularInput: return "SingularInput";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BadDegree: return "BadDegree";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateImage: return "DegenerateImage";
    case ErrorCode::NotInChart: return "NotInChart";
    case ErrorCode::InfiniteCrossRatio: return "InfiniteCrossRatio";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::LineInHyperplane: return "LineInHyperplane";
    case ErrorCode::InvalidDomain: return "InvalidDomain";
    case ErrorCode::NotInDomain: return "NotInDomain";
    case ErrorCode::DegenerateLine: return "DegenerateLine";
    case ErrorCode::NotNested: return "NotNested";
    case ErrorCode::NotStrictlyNested: return "NotStrictlyNested";
    case ErrorCode::BadOrder: return "BadOrder";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::MissingDomain: return "MissingDomain";
    case ErrorCode::EvaluationError: return "EvaluationError";
    case ErrorCode::BaseFails: return "BaseFails";
    case ErrorCode::SynthesisFailed: return "SynthesisFailed";
    case ErrorCode::NotCertified: return "NotCertified";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::GapTooSmall: return "GapTooSmall";
    case ErrorCode::PathNotFound: return "PathNotFound";
    case ErrorCode::OutOfBall: return "OutOfBall";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace flagcert
