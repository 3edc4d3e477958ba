#pragma once

// Econometric estimation of the linear demand EoS.
//
// Observations map to the regression frame
//   y = Qd / q0,  x1 = phi - phi0,  x2 = Pr - pr0
// and the model y = 1 + beta x1 - kappa x2 + u is fitted by least squares with
// the intercept held at 1. A free-intercept fit is kept as a diagnostic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "thermoecon/core.hpp"
#include "thermoecon/eos.hpp"
#include "thermoecon/error.hpp"
#include "thermoecon/kvdoc.hpp"

namespace thermoecon::estimation {

using Observation = StatePoint;

struct Baselines {
  GoodsQty q0 = 0.0;
  Price pr0 = 0.0;
  PersonalWealth phi0 = 0.0;
};

struct FrameRow {
  double y = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
};

struct RegressionFrame {
  std::vector<FrameRow> rows;
  Baselines baselines;
};

struct InterceptDiagnostic {
  double intercept_hat = 0.0;
  double se = 0.0;
};

struct FitResult {
  double beta_hat = 0.0;
  double kappa_hat = 0.0;
  double se_beta = 0.0;
  double se_kappa = 0.0;
  double r2 = 0.0;
  std::vector<double> residuals;  // y - predicted, per row
  std::optional<InterceptDiagnostic> intercept_diagnostic;
  Baselines baselines;
};

inline constexpr std::size_t kMinObservations = 3;

inline RegressionFrame build_frame(const std::vector<Observation>& data,
                                   std::optional<Baselines> baselines = std::nullopt) {
  if (data.size() < kMinObservations) {
    throw Error(ErrorCode::TooFewObservations,
                "need at least " + std::to_string(kMinObservations) + " observations, got " +
                    std::to_string(data.size()));
  }
  for (const auto& o : data) require_valid(o);

  RegressionFrame f;
  if (baselines) {
    f.baselines = *baselines;
  } else {
    double sq = 0.0, sp = 0.0, sw = 0.0;
    for (const auto& o : data) {
      sq += o.qd;
      sp += o.pr;
      sw += o.phi;
    }
    const double n = static_cast<double>(data.size());
    f.baselines = {sq / n, sp / n, sw / n};
  }
  if (!(f.baselines.q0 > 0.0)) throw Error(ErrorCode::Domain, "baseline demand q0 must be > 0");

  f.rows.reserve(data.size());
  for (const auto& o : data) {
    f.rows.push_back({o.qd / f.baselines.q0, o.phi - f.baselines.phi0, o.pr - f.baselines.pr0});
  }
  return f;
}

inline double predict(const FitResult& fit, const FrameRow& row) noexcept {
  return 1.0 + fit.beta_hat * row.x1 - fit.kappa_hat * row.x2;
}

namespace detail {

struct Solve2 {
  double b1, b2;
  double inv11, inv12, inv22;
};

/// Solves the 2x2 normal equations [s11 s12; s12 s22] b = [r1; r2].
inline Solve2 solve_normal(double s11, double s12, double s22, double r1, double r2) {
  const double det = s11 * s22 - s12 * s12;
  if (!(std::abs(det) > 1e-12 * s11 * s22)) {
    throw Error(ErrorCode::Collinear, "regressors are collinear (singular normal matrix)");
  }
  const double inv11 = s22 / det, inv12 = -s12 / det, inv22 = s11 / det;
  return {inv11 * r1 + inv12 * r2, inv12 * r1 + inv22 * r2, inv11, inv12, inv22};
}

inline double variance(const std::vector<FrameRow>& rows, double FrameRow::*col) {
  double mean = 0.0;
  for (const auto& r : rows) mean += r.*col;
  mean /= static_cast<double>(rows.size());
  double ss = 0.0;
  for (const auto& r : rows) ss += (r.*col - mean) * (r.*col - mean);
  return ss / static_cast<double>(rows.size());
}

inline double scale2(const std::vector<FrameRow>& rows, double FrameRow::*col) {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, std::abs(r.*col));
  return m;
}

/// Free-intercept fit y = c + beta x1 - kappa x2 through centered slopes;
/// reports only c and its standard error (n - 3 degrees of freedom).
inline std::optional<InterceptDiagnostic> free_intercept(const std::vector<FrameRow>& rows) {
  const double nn = static_cast<double>(rows.size());
  double ma = 0.0, mb = 0.0, my = 0.0;
  for (const auto& r : rows) {
    ma += r.x1;
    mb += -r.x2;
    my += r.y;
  }
  ma /= nn;
  mb /= nn;
  my /= nn;
  double caa = 0.0, cab = 0.0, cbb = 0.0, cya = 0.0, cyb = 0.0;
  for (const auto& r : rows) {
    const double a = r.x1 - ma, b = -r.x2 - mb, y = r.y - my;
    caa += a * a;
    cab += a * b;
    cbb += b * b;
    cya += y * a;
    cyb += y * b;
  }
  Solve2 c{};
  try {
    c = solve_normal(caa, cab, cbb, cya, cyb);
  } catch (const Error&) {
    return std::nullopt;
  }
  const double intercept = my - c.b1 * ma - c.b2 * mb;
  if (rows.size() <= 3) return InterceptDiagnostic{intercept, 0.0};
  double rss = 0.0;
  for (const auto& r : rows) {
    const double e = r.y - (intercept + c.b1 * r.x1 - c.b2 * r.x2);
    rss += e * e;
  }
  const double s2 = rss / (nn - 3.0);
  const double quad = ma * ma * c.inv11 + 2.0 * ma * mb * c.inv12 + mb * mb * c.inv22;
  return InterceptDiagnostic{intercept, std::sqrt(s2 * (1.0 / nn + quad))};
}

}  // namespace detail

/// Least squares of (y - 1) on [x1, -x2] without intercept, homoskedastic
/// standard errors with n - 2 degrees of freedom.
inline FitResult fit(const RegressionFrame& frame) {
  const auto& rows = frame.rows;
  const std::size_t n = rows.size();
  if (n < kMinObservations) throw Error(ErrorCode::TooFewObservations, "need at least 3 rows to fit");

  for (auto col : {&FrameRow::x1, &FrameRow::x2}) {
    const double s = detail::scale2(rows, col);
    if (!(detail::variance(rows, col) > 1e-24 * std::max(1.0, s * s))) {
      throw Error(ErrorCode::Degenerate,
                  std::string("zero-variance regressor ") + (col == &FrameRow::x1 ? "x1 (phi)" : "x2 (price)"));
    }
  }

  // z = y - 1 = beta * a + kappa * b with a = x1, b = -x2
  double saa = 0.0, sab = 0.0, sbb = 0.0, sza = 0.0, szb = 0.0, szz = 0.0;
  for (const auto& r : rows) {
    const double a = r.x1, b = -r.x2, z = r.y - 1.0;
    saa += a * a;
    sab += a * b;
    sbb += b * b;
    sza += z * a;
    szb += z * b;
    szz += z * z;
  }
  const auto sol = detail::solve_normal(saa, sab, sbb, sza, szb);

  FitResult out;
  out.baselines = frame.baselines;
  out.beta_hat = sol.b1;
  out.kappa_hat = sol.b2;
  out.residuals.reserve(n);
  double rss = 0.0;
  for (const auto& r : rows) {
    const double e = r.y - predict(out, r);
    out.residuals.push_back(e);
    rss += e * e;
  }
  const double sigma2 = rss / static_cast<double>(n - 2);
  out.se_beta = std::sqrt(sigma2 * sol.inv11);
  out.se_kappa = std::sqrt(sigma2 * sol.inv22);
  out.r2 = szz > 0.0 ? 1.0 - rss / szz : 1.0;

  out.intercept_diagnostic = detail::free_intercept(rows);
  return out;
}

/// Elasticities implied by a fit at its baselines.
inline eos::Elasticities elasticities(const FitResult& f) noexcept {
  return {f.beta_hat * f.baselines.phi0, -f.kappa_hat * f.baselines.pr0};
}

inline eos::LinearElasticityEos to_model(const FitResult& f) noexcept {
  return {f.baselines.q0, f.baselines.pr0, f.baselines.phi0, f.beta_hat, f.kappa_hat};
}

struct SamplingRanges {
  double phi_lo = 0.0, phi_hi = 0.0;
  double pr_lo = 0.0, pr_hi = 0.0;
};

/// Draws phi and Pr uniformly, places Qd on the surface and perturbs it by a
/// relative Normal(0, noise_sigma) error. Bit-identical for a given seed on
/// a given build.
inline std::vector<Observation> generate_synthetic(const eos::LinearElasticityEos& model, int n,
                                                   double noise_sigma, std::uint64_t seed,
                                                   const SamplingRanges& ranges) {
  if (n < 1) throw Error(ErrorCode::Domain, "n must be >= 1");
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::Domain, "noise_sigma must be >= 0");
  if (!(ranges.phi_lo > 0.0) || !(ranges.pr_lo > 0.0) || ranges.phi_hi < ranges.phi_lo ||
      ranges.pr_hi < ranges.pr_lo) {
    throw Error(ErrorCode::Domain, "sampling ranges must be positive and ordered");
  }
  // Demand is affine in (phi, Pr): its minimum over the box sits at a corner.
  for (double phi : {ranges.phi_lo, ranges.phi_hi}) {
    for (double pr : {ranges.pr_lo, ranges.pr_hi}) {
      if (model.qd_unchecked(pr, phi) < 0.0) {
        throw Error(ErrorCode::Domain, "sampling ranges reach negative demand");
      }
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Observation> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double phi = ranges.phi_lo + (ranges.phi_hi - ranges.phi_lo) * u01(rng);
    const double pr = ranges.pr_lo + (ranges.pr_hi - ranges.pr_lo) * u01(rng);
    const double eps = noise(rng);
    double qd = model.qd_of(pr, phi);
    if (noise_sigma > 0.0) qd *= 1.0 + noise_sigma * eps;
    if (qd < 0.0) throw Error(ErrorCode::Domain, "noise drove demand negative; reduce noise_sigma");
    out.push_back({qd, pr, phi});
  }
  return out;
}

inline KvDoc to_kv(const FitResult& f) {
  KvDoc d;
  d.set("beta_hat", f.beta_hat);
  d.set("kappa_hat", f.kappa_hat);
  d.set("se_beta", f.se_beta);
  d.set("se_kappa", f.se_kappa);
  d.set("r2", f.r2);
  d.set("n", static_cast<long long>(f.residuals.size()));
  d.set("q0", f.baselines.q0);
  d.set("pr0", f.baselines.pr0);
  d.set("phi0", f.baselines.phi0);
  const auto e = elasticities(f);
  d.set("e_phi", e.e_phi);
  d.set("e_pr", e.e_pr);
  if (f.intercept_diagnostic) {
    d.set("intercept_hat", f.intercept_diagnostic->intercept_hat);
    d.set("intercept_se", f.intercept_diagnostic->se);
  }
  return d;
}

// ---- delimited text datasets, header "qd,pr,phi" ----

inline void write_csv(std::ostream& os, const std::vector<Observation>& data) {
  os << "qd,pr,phi\n";
  for (const auto& o : data) {
    os << format_number(o.qd) << ',' << format_number(o.pr) << ',' << format_number(o.phi) << '\n';
  }
}

inline std::vector<Observation> read_csv(std::istream& is) {
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  std::vector<Observation> out;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "qd,pr,phi") throw Error(ErrorCode::Parse, "expected header 'qd,pr,phi', got '" + line + "'");
      header_seen = true;
      continue;
    }
    std::string_view s = line;
    auto c1 = s.find(',');
    auto c2 = c1 == std::string_view::npos ? c1 : s.find(',', c1 + 1);
    if (c2 == std::string_view::npos || s.find(',', c2 + 1) != std::string_view::npos) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(lineno) + ": expected three fields");
    }
    try {
      out.push_back({parse_number(s.substr(0, c1)), parse_number(s.substr(c1 + 1, c2 - c1 - 1)),
                     parse_number(s.substr(c2 + 1))});
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header_seen) throw Error(ErrorCode::Parse, "empty dataset (missing header)");
  return out;
}

}  // namespace thermoecon::estimation
