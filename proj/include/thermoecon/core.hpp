#pragma once

// Shared state records for the demand-side system: demand quantity Qd (the
// extensive coordinate), price Pr (intensive) and average personal wealth phi
// (temperature-like), plus population and total-wealth bookkeeping.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thermoecon/error.hpp"

namespace thermoecon {

using GoodsQty = double;
using Price = double;
using PersonalWealth = double;
using Money = double;
using Entropy = double;
using Population = std::int64_t;

struct StatePoint {
  GoodsQty qd = 0.0;
  Price pr = 0.0;
  PersonalWealth phi = 0.0;

  friend bool operator==(const StatePoint&, const StatePoint&) = default;
};

/// A population of consumers sitting at one point. `entropy` is an offset from
/// an arbitrary reference; only differences are meaningful.
struct SystemState {
  StatePoint point;
  Population n = 1;
  std::optional<Entropy> entropy;
};

enum class StateViolation { NonFinite, NegativeQuantity, NonPositivePrice, NonPositiveWealth, NonPositivePopulation };

inline const char* describe(StateViolation v) noexcept {
  switch (v) {
    case StateViolation::NonFinite: return "non-finite coordinate";
    case StateViolation::NegativeQuantity: return "negative quantity";
    case StateViolation::NonPositivePrice: return "non-positive price";
    case StateViolation::NonPositiveWealth: return "non-positive personal wealth";
    case StateViolation::NonPositivePopulation: return "population below 1";
  }
  return "unknown";
}

struct ValidationOutcome {
  std::vector<StateViolation> violations;
  bool valid() const noexcept { return violations.empty(); }
};

inline ValidationOutcome validate_state(const StatePoint& p) {
  ValidationOutcome out;
  if (!std::isfinite(p.qd) || !std::isfinite(p.pr) || !std::isfinite(p.phi)) {
    out.violations.push_back(StateViolation::NonFinite);
  }
  // NaN compares false everywhere, so these only fire on real violations.
  if (p.qd < 0.0) out.violations.push_back(StateViolation::NegativeQuantity);
  if (!(p.pr > 0.0) && !std::isnan(p.pr)) out.violations.push_back(StateViolation::NonPositivePrice);
  if (!(p.phi > 0.0) && !std::isnan(p.phi)) out.violations.push_back(StateViolation::NonPositiveWealth);
  return out;
}

inline ValidationOutcome validate_state(const SystemState& s) {
  auto out = validate_state(s.point);
  if (s.n < 1) out.violations.push_back(StateViolation::NonPositivePopulation);
  return out;
}

/// Throws ErrorCode::InvalidState listing every violation.
inline void require_valid(const StatePoint& p) {
  auto v = validate_state(p);
  if (v.valid()) return;
  std::string msg = "invalid state:";
  for (auto x : v.violations) (msg += ' ') += describe(x);
  throw Error(ErrorCode::InvalidState, msg);
}

inline void require_valid(const SystemState& s) {
  auto v = validate_state(s);
  if (v.valid()) return;
  std::string msg = "invalid state:";
  for (auto x : v.violations) (msg += ' ') += describe(x);
  throw Error(ErrorCode::InvalidState, msg);
}

/// W = N * phi.
constexpr Money total_wealth(Population n, PersonalWealth phi) noexcept { return static_cast<double>(n) * phi; }
constexpr Money total_wealth(const SystemState& s) noexcept { return total_wealth(s.n, s.point.phi); }

}  // namespace thermoecon
