#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "thermoecon/estimation.hpp"

using namespace thermoecon;
using namespace thermoecon::estimation;
using eos::LinearElasticityEos;

namespace {

const LinearElasticityEos kModel{100.0, 10.0, 50.0, 0.02, 0.05};
const SamplingRanges kRanges{40.0, 60.0, 8.0, 12.0};
const Baselines kTrueBaselines{100.0, 10.0, 50.0};

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::Io;
}

}  // namespace

TEST(BuildFrame, BaselineRowAndWorkedPoint) {
  std::vector<Observation> data{{100, 10, 50}, {130, 8, 60}, {90, 11, 48}};
  auto f = build_frame(data, kTrueBaselines);
  EXPECT_EQ(f.rows[0].y, 1.0);
  EXPECT_EQ(f.rows[0].x1, 0.0);
  EXPECT_EQ(f.rows[0].x2, 0.0);
  EXPECT_DOUBLE_EQ(f.rows[1].y, 1.3);
  EXPECT_DOUBLE_EQ(f.rows[1].x1, 10.0);
  EXPECT_DOUBLE_EQ(f.rows[1].x2, -2.0);
  EXPECT_EQ(f.baselines.q0, 100.0);
}

TEST(BuildFrame, DefaultsToSampleMeans) {
  std::vector<Observation> data{{100, 10, 50}, {120, 10, 60}, {110, 10, 55}};
  auto f = build_frame(data);
  EXPECT_DOUBLE_EQ(f.baselines.q0, 110.0);
  EXPECT_DOUBLE_EQ(f.baselines.pr0, 10.0);
  EXPECT_DOUBLE_EQ(f.baselines.phi0, 55.0);
}

TEST(BuildFrame, Errors) {
  EXPECT_EQ(code_of([] { build_frame({{1, 1, 1}, {2, 2, 2}}); }), ErrorCode::TooFewObservations);
  EXPECT_EQ(code_of([] { build_frame({{1, 1, 1}, {2, 2, 2}, {3, 3, 3}}, Baselines{0, 1, 1}); }), ErrorCode::Domain);
  EXPECT_EQ(code_of([] { build_frame({{1, 1, 1}, {2, -2, 2}, {3, 3, 3}}); }), ErrorCode::InvalidState);
}

TEST(Fit, NoiselessRecovery) {
  auto data = generate_synthetic(kModel, 50, 0.0, 11, kRanges);
  auto r = fit(build_frame(data, kTrueBaselines));
  EXPECT_NEAR(r.beta_hat, 0.02, 1e-9 * 0.02);
  EXPECT_NEAR(r.kappa_hat, 0.05, 1e-9 * 0.05);
  EXPECT_NEAR(r.r2, 1.0, 1e-12);
  ASSERT_TRUE(r.intercept_diagnostic);
  EXPECT_NEAR(r.intercept_diagnostic->intercept_hat, 1.0, 1e-10);
}

TEST(Fit, MeanBaselinesReparameterizeTheSameSurface) {
  auto data = generate_synthetic(kModel, 200, 0.0, 5, kRanges);
  auto r = fit(build_frame(data));
  // The fitted surface reproduces every observation.
  auto m = to_model(r);
  for (const auto& o : data) EXPECT_NEAR(m.qd_unchecked(o.pr, o.phi), o.qd, 1e-9 * o.qd);
}

TEST(Fit, ResidualsOrthogonalToRegressors) {
  auto data = generate_synthetic(kModel, 300, 0.02, 17, kRanges);
  auto frame = build_frame(data, kTrueBaselines);
  auto r = fit(frame);
  double d1 = 0, d2 = 0, n1 = 0, n2 = 0, ne = 0;
  for (std::size_t i = 0; i < frame.rows.size(); ++i) {
    d1 += r.residuals[i] * frame.rows[i].x1;
    d2 += r.residuals[i] * frame.rows[i].x2;
    n1 += frame.rows[i].x1 * frame.rows[i].x1;
    n2 += frame.rows[i].x2 * frame.rows[i].x2;
    ne += r.residuals[i] * r.residuals[i];
  }
  EXPECT_LE(std::abs(d1), 1e-9 * std::sqrt(n1 * ne));
  EXPECT_LE(std::abs(d2), 1e-9 * std::sqrt(n2 * ne));
}

TEST(Fit, EquivariantUnderWealthShift) {
  auto data = generate_synthetic(kModel, 100, 0.01, 23, kRanges);
  auto base = fit(build_frame(data, kTrueBaselines));
  for (auto& o : data) o.phi += 1234.5;
  auto shifted = fit(build_frame(data, Baselines{100.0, 10.0, 50.0 + 1234.5}));
  EXPECT_NEAR(shifted.beta_hat, base.beta_hat, 1e-9 * std::abs(base.beta_hat));
  EXPECT_NEAR(shifted.kappa_hat, base.kappa_hat, 1e-9 * std::abs(base.kappa_hat));
}

TEST(Fit, DegenerateInputs) {
  std::vector<Observation> same(5, Observation{100, 10, 50});
  EXPECT_EQ(code_of([&] { fit(build_frame(same)); }), ErrorCode::Degenerate);
  std::vector<Observation> flat_price{{100, 10, 50}, {120, 10, 60}, {90, 10, 45}, {105, 10, 52}};
  EXPECT_EQ(code_of([&] { fit(build_frame(flat_price, kTrueBaselines)); }), ErrorCode::Degenerate);
  // phi and price moving in lockstep: x1 = -5 x2 exactly.
  std::vector<Observation> lockstep{{100, 10, 50}, {110, 12, 40}, {95, 9, 55}, {97, 8, 60}};
  EXPECT_EQ(code_of([&] { fit(build_frame(lockstep, kTrueBaselines)); }), ErrorCode::Collinear);
}

TEST(Fit, ElasticitiesConvergeAsNoiseVanishes) {
  auto truth = eos::elasticities(kModel);
  double prev = HUGE_VAL;
  for (double sigma : {0.05, 0.005, 0.0005, 0.0}) {
    auto r = fit(build_frame(generate_synthetic(kModel, 400, sigma, 3, kRanges), kTrueBaselines));
    auto e = elasticities(r);
    const double err = std::abs(e.e_phi - truth.e_phi) + std::abs(e.e_pr - truth.e_pr);
    EXPECT_LE(err, prev);
    prev = err;
  }
  EXPECT_LE(prev, 1e-9);
}

TEST(Predict, Definitions) {
  FitResult f;
  f.beta_hat = 0.02;
  f.kappa_hat = 0.05;
  EXPECT_EQ(predict(f, {0, 0, 0}), 1.0);
  EXPECT_NEAR(predict(f, {0, 10, -2}), 1.3, 1e-15);

  auto frame = build_frame(generate_synthetic(kModel, 30, 0.03, 9, kRanges), kTrueBaselines);
  auto r = fit(frame);
  for (std::size_t i = 0; i < frame.rows.size(); ++i) {
    EXPECT_NEAR(predict(r, frame.rows[i]) - frame.rows[i].y, -r.residuals[i], 1e-15);
  }
}

TEST(Synthetic, ZeroNoiseLiesOnSurface) {
  for (const auto& o : generate_synthetic(kModel, 100, 0.0, 1, kRanges)) {
    EXPECT_LE(std::abs(kModel.residual(o)), 1e-12);
    EXPECT_GE(o.phi, kRanges.phi_lo);
    EXPECT_LE(o.phi, kRanges.phi_hi);
  }
}

TEST(Synthetic, SeedDeterminism) {
  auto a = generate_synthetic(kModel, 64, 0.01, 42, kRanges);
  auto b = generate_synthetic(kModel, 64, 0.01, 42, kRanges);
  auto c = generate_synthetic(kModel, 64, 0.01, 43, kRanges);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Synthetic, RangeOutsideDomain) {
  EXPECT_EQ(code_of([] { generate_synthetic(kModel, 10, 0.0, 1, {40, 60, 8, 40}); }), ErrorCode::Domain);
  EXPECT_EQ(code_of([] { generate_synthetic(kModel, 0, 0.0, 1, kRanges); }), ErrorCode::Domain);
}

TEST(Csv, RoundTripIsBitExact) {
  auto data = generate_synthetic(kModel, 25, 0.01, 8, kRanges);
  std::stringstream ss;
  write_csv(ss, data);
  EXPECT_EQ(read_csv(ss), data);
}

TEST(Csv, Errors) {
  std::istringstream bad_header("q,p,f\n1,2,3\n");
  EXPECT_EQ(code_of([&] { read_csv(bad_header); }), ErrorCode::Parse);
  std::istringstream bad_row("qd,pr,phi\n1,2\n");
  EXPECT_EQ(code_of([&] { read_csv(bad_row); }), ErrorCode::Parse);
  std::istringstream bad_num("qd,pr,phi\n1,2,3x\n");
  EXPECT_EQ(code_of([&] { read_csv(bad_num); }), ErrorCode::Parse);
  std::istringstream crlf("qd,pr,phi\r\n1,2,3\r\n");
  EXPECT_EQ(read_csv(crlf).size(), 1u);
}

TEST(FitDocument, FieldNames) {
  auto r = fit(build_frame(generate_synthetic(kModel, 50, 0.0, 11, kRanges), kTrueBaselines));
  auto doc = to_kv(r);
  for (const char* k : {"beta_hat", "kappa_hat", "se_beta", "se_kappa", "r2", "intercept_hat"}) {
    EXPECT_TRUE(doc.get(k)) << k;
  }
}
