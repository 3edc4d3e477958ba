#include <gtest/gtest.h>

#include <limits>

#include "thermoecon/core.hpp"

using namespace thermoecon;

TEST(TotalWealth, ProductOfPopulationAndPersonalWealth) {
  EXPECT_EQ(total_wealth(SystemState{{0, 1, 50}, 1, {}}), 50.0);
  EXPECT_EQ(total_wealth(SystemState{{0, 1, 50}, 10, {}}), 500.0);
  EXPECT_NEAR(total_wealth(5, std::numeric_limits<double>::denorm_min()), 0.0, 1e-300);
}

TEST(TotalWealth, LinearInPopulationAndWealth) {
  for (Population n : {1, 3, 17, 1000}) {
    for (double phi : {0.5, 50.0, 1234.25}) {
      EXPECT_EQ(total_wealth(2 * n, phi), 2.0 * total_wealth(n, phi));
      EXPECT_EQ(total_wealth(n, 2.0 * phi), 2.0 * total_wealth(n, phi));
    }
  }
}

TEST(ValidateState, AcceptsInteriorAndZeroDemand) {
  EXPECT_TRUE(validate_state(StatePoint{100, 10, 50}).valid());
  EXPECT_TRUE(validate_state(StatePoint{0, 10, 50}).valid());
}

TEST(ValidateState, ReportsEveryViolation) {
  auto one = validate_state(StatePoint{-1, 10, 50});
  ASSERT_EQ(one.violations.size(), 1u);
  EXPECT_EQ(one.violations[0], StateViolation::NegativeQuantity);

  auto all = validate_state(StatePoint{-1, 0, -5});
  EXPECT_EQ(all.violations.size(), 3u);

  auto nan = validate_state(StatePoint{std::numeric_limits<double>::quiet_NaN(), 10, 50});
  ASSERT_FALSE(nan.valid());
  EXPECT_EQ(nan.violations[0], StateViolation::NonFinite);
}

TEST(ValidateState, PopulationBelowOneRejected) {
  EXPECT_FALSE(validate_state(SystemState{{1, 1, 1}, 0, {}}).valid());
  EXPECT_THROW(require_valid(SystemState{{1, 1, 1}, 0, {}}), Error);
  EXPECT_NO_THROW(require_valid(SystemState{{1, 1, 1}, 1, {}}));
}

TEST(ValidateState, RequireValidCarriesCode) {
  try {
    require_valid(StatePoint{1, -2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidState);
    EXPECT_NE(std::string(e.what()).find("non-positive price"), std::string::npos);
  }
}
