#include "bcvsc/error.hpp"

namespace bcvsc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::GammaOutOfRange: return "GammaOutOfRange";
    case ErrorCode::ZeroDegree: return "ZeroDegree";
    case ErrorCode::SingularAfterRegularization: return "SingularAfterRegularization";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::RankOutOfRange: return "RankOutOfRange";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::SeparationUnsatisfiable: return "SeparationUnsatisfiable";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace bcvsc
