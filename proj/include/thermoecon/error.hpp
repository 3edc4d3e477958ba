#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thermoecon {

enum class ErrorCode {
  InvalidState,
  Parse,
  UnknownName,
  SelfLoop,
  Rule1,
  Rule2,
  Rule3,
  Domain,
  NegativeDemand,
  Singular,
  OffSurface,
  Constraint,
  TooFewObservations,
  Degenerate,
  Collinear,
  NoChokePrice,
  Io,
};

/// Stable, machine-parsable identifier printed by the CLI.
constexpr std::string_view code_name(ErrorCode c) noexcept {
  switch (c) {
    case ErrorCode::InvalidState: return "ERR_INVALID_STATE";
    case ErrorCode::Parse: return "ERR_PARSE";
    case ErrorCode::UnknownName: return "ERR_UNKNOWN_NAME";
    case ErrorCode::SelfLoop: return "ERR_SELF_LOOP";
    case ErrorCode::Rule1: return "ERR_RULE_1";
    case ErrorCode::Rule2: return "ERR_RULE_2";
    case ErrorCode::Rule3: return "ERR_RULE_3";
    case ErrorCode::Domain: return "ERR_DOMAIN";
    case ErrorCode::NegativeDemand: return "ERR_NEGATIVE_DEMAND";
    case ErrorCode::Singular: return "ERR_SINGULAR";
    case ErrorCode::OffSurface: return "ERR_OFF_SURFACE";
    case ErrorCode::Constraint: return "ERR_CONSTRAINT";
    case ErrorCode::TooFewObservations: return "ERR_TOO_FEW";
    case ErrorCode::Degenerate: return "ERR_DEGENERATE";
    case ErrorCode::Collinear: return "ERR_COLLINEAR";
    case ErrorCode::NoChokePrice: return "ERR_NO_CHOKE";
    case ErrorCode::Io: return "ERR_IO";
  }
  return "ERR_UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace thermoecon
