#include "rqfi/error.hpp"

namespace rqfi {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::QuadratureDomainTooSmall: return "QuadratureDomainTooSmall";
    case ErrorCode::EpsilonNegative: return "EpsilonNegative";
    case ErrorCode::EtaOutOfRange: return "EtaOutOfRange";
    case ErrorCode::DegenerateAngle: return "DegenerateAngle";
    case ErrorCode::CutoffOverflow: return "CutoffOverflow";
    case ErrorCode::UnsupportedBasis: return "UnsupportedBasis";
    case ErrorCode::UnsupportedState: return "UnsupportedState";
    case ErrorCode::UnphysicalState: return "UnphysicalState";
    case ErrorCode::ZeroInformation: return "ZeroInformation";
    case ErrorCode::TruncationBudgetExceeded: return "TruncationBudgetExceeded";
    case ErrorCode::UnsupportedPsf: return "UnsupportedPsf";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::FlatLikelihood: return "FlatLikelihood";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace rqfi
