#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rqfi {

enum class ErrorCode {
  ZeroNorm,
  NonFinite,
  QuadratureDomainTooSmall,
  EpsilonNegative,
  EtaOutOfRange,
  DegenerateAngle,
  CutoffOverflow,
  UnsupportedBasis,
  UnsupportedState,
  UnphysicalState,
  ZeroInformation,
  TruncationBudgetExceeded,
  UnsupportedPsf,
  IllConditioned,
  FlatLikelihood,
  InvalidArgument,
  IoFailure,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rqfi
