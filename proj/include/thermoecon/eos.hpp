#pragma once

// Closed-form equation-of-state surfaces g(Qd, Pr, phi) = 0.
//
// Every model exposes the same contract (see the EosModel concept): solve for
// any one coordinate given the other two, the two partials of the extensive
// coordinate, and a normalized residual that is zero on the surface and
// positive when the extensive coordinate exceeds its surface value. Reference
// models from physics reuse the same slots with X/Y/T in place of Qd/Pr/phi.

#include <cmath>
#include <concepts>
#include <optional>
#include <string>

#include "thermoecon/core.hpp"
#include "thermoecon/error.hpp"
#include "thermoecon/kvdoc.hpp"

namespace thermoecon::eos {

struct Partials {
  double dqd_dphi = 0.0;  // (dQd/dphi) at constant Pr
  double dqd_dpr = 0.0;   // (dQd/dPr) at constant phi
};

template <class M>
concept EosModel = requires(const M& m, double a, double b, const StatePoint& p) {
  { m.qd_of(a, b) } -> std::convertible_to<double>;
  { m.pr_of(a, b) } -> std::convertible_to<double>;
  { m.phi_of(a, b) } -> std::convertible_to<double>;
  { m.partials(p) } -> std::same_as<Partials>;
  { m.residual(p) } -> std::convertible_to<double>;
};

struct Elasticities {
  double e_phi = 0.0;  // wealth elasticity of demand at the baseline
  double e_pr = 0.0;   // price elasticity of demand at the baseline
};

/// Qd(Pr, phi) = q0 [1 + beta_pr (phi - phi0) - kappa_phi (Pr - pr0)]
///
/// The aggregate itself accepts any coefficients (a fit can produce a
/// negative kappa); use checked() where the economic invariants must hold.
struct LinearElasticityEos {
  GoodsQty q0 = 1.0;
  Price pr0 = 1.0;
  PersonalWealth phi0 = 1.0;
  double beta_pr = 0.0;
  double kappa_phi = 0.0;

  static LinearElasticityEos checked(double q0, double pr0, double phi0, double beta_pr, double kappa_phi) {
    LinearElasticityEos m{q0, pr0, phi0, beta_pr, kappa_phi};
    m.require_invariants();
    return m;
  }

  void require_invariants() const {
    std::string bad;
    auto finite = std::isfinite(q0) && std::isfinite(pr0) && std::isfinite(phi0) && std::isfinite(beta_pr) &&
                  std::isfinite(kappa_phi);
    if (!finite) bad += " non-finite parameter;";
    if (!(q0 > 0.0)) bad += " q0 must be > 0;";
    if (!(pr0 > 0.0)) bad += " pr0 must be > 0;";
    if (!(phi0 > 0.0)) bad += " phi0 must be > 0;";
    if (!(kappa_phi > 0.0)) bad += " kappa_phi must be > 0;";
    if (!(beta_pr >= 0.0)) bad += " beta_pr must be >= 0;";
    if (!bad.empty()) throw Error(ErrorCode::Domain, "invalid linear EoS parameters:" + bad);
  }

  /// Surface value without the nonnegative-demand check.
  double qd_unchecked(Price pr, PersonalWealth phi) const noexcept {
    return q0 * (1.0 + beta_pr * (phi - phi0) - kappa_phi * (pr - pr0));
  }

  GoodsQty qd_of(Price pr, PersonalWealth phi) const {
    double q = qd_unchecked(pr, phi);
    if (q < 0.0) {
      throw Error(ErrorCode::NegativeDemand, "negative demand " + format_number(q) + " at pr=" + format_number(pr) +
                                                 ", phi=" + format_number(phi));
    }
    return q;
  }

  Price pr_of(GoodsQty qd, PersonalWealth phi) const {
    if (kappa_phi == 0.0) throw Error(ErrorCode::Singular, "pr_of undefined: kappa_phi is zero");
    double pr = pr0 + (1.0 + beta_pr * (phi - phi0) - qd / q0) / kappa_phi;
    if (!(pr > 0.0)) throw Error(ErrorCode::Domain, "non-positive price " + format_number(pr));
    return pr;
  }

  PersonalWealth phi_of(GoodsQty qd, Price pr) const {
    if (beta_pr == 0.0) throw Error(ErrorCode::Singular, "phi_of undefined: beta_pr is zero");
    double phi = phi0 + (qd / q0 - 1.0 + kappa_phi * (pr - pr0)) / beta_pr;
    if (!(phi > 0.0)) throw Error(ErrorCode::Domain, "non-positive personal wealth " + format_number(phi));
    return phi;
  }

  Partials partials(const StatePoint&) const noexcept { return {q0 * beta_pr, -q0 * kappa_phi}; }

  double residual(const StatePoint& p) const noexcept { return (p.qd - qd_unchecked(p.pr, p.phi)) / q0; }

  /// Price where demand reaches zero at the given wealth.
  std::optional<Price> choke_price(PersonalWealth phi) const noexcept {
    if (!(kappa_phi > 0.0)) return std::nullopt;
    return pr0 + (1.0 + beta_pr * (phi - phi0)) / kappa_phi;
  }

  friend bool operator==(const LinearElasticityEos&, const LinearElasticityEos&) = default;
};

inline Elasticities elasticities(const LinearElasticityEos& m) noexcept {
  return {m.beta_pr * m.phi0, -m.kappa_phi * m.pr0};
}

inline KvDoc to_kv(const LinearElasticityEos& m) {
  KvDoc d;
  d.set("q0", m.q0);
  d.set("pr0", m.pr0);
  d.set("phi0", m.phi0);
  d.set("beta_pr", m.beta_pr);
  d.set("kappa_phi", m.kappa_phi);
  return d;
}

/// Strict: all five keys required, no others allowed.
inline LinearElasticityEos linear_eos_from_kv(const KvDoc& d) {
  for (const auto& [k, v] : d.items()) {
    if (k != "q0" && k != "pr0" && k != "phi0" && k != "beta_pr" && k != "kappa_phi") {
      throw Error(ErrorCode::Parse, "unknown parameter key '" + k + "'");
    }
  }
  return {d.number("q0"), d.number("pr0"), d.number("phi0"), d.number("beta_pr"), d.number("kappa_phi")};
}

/// Pr * Qd = N * phi. Exact economic analogue of the ideal gas; its heat form
/// N dphi + Pr dQd is integrable with dS = N dphi/phi + N dQd/Qd.
struct IdealAnalogEos {
  Population n = 1;

  double scale() const noexcept { return static_cast<double>(n); }

  GoodsQty qd_of(Price pr, PersonalWealth phi) const {
    if (!(pr > 0.0)) throw Error(ErrorCode::Singular, "qd_of undefined at non-positive price");
    return scale() * phi / pr;
  }
  Price pr_of(GoodsQty qd, PersonalWealth phi) const {
    if (!(qd > 0.0)) throw Error(ErrorCode::Singular, "pr_of undefined at zero demand");
    return scale() * phi / qd;
  }
  PersonalWealth phi_of(GoodsQty qd, Price pr) const { return pr * qd / scale(); }

  Partials partials(const StatePoint& p) const noexcept {
    return {scale() / p.pr, -scale() * p.phi / (p.pr * p.pr)};
  }
  double residual(const StatePoint& p) const noexcept {
    double rhs = scale() * p.phi;
    return (p.pr * p.qd - rhs) / rhs;
  }
};

/// P V = n R T with X = V, Y = P.
struct IdealGasEos {
  double n_amount = 1.0;
  double gas_constant = 8.314462618;

  double nr() const noexcept { return n_amount * gas_constant; }

  double qd_of(double p, double t) const {
    if (!(p > 0.0)) throw Error(ErrorCode::Singular, "volume undefined at non-positive pressure");
    return nr() * t / p;
  }
  double pr_of(double v, double t) const {
    if (!(v > 0.0)) throw Error(ErrorCode::Singular, "pressure undefined at zero volume");
    return nr() * t / v;
  }
  double phi_of(double v, double p) const { return p * v / nr(); }

  Partials partials(const StatePoint& s) const noexcept { return {nr() / s.pr, -nr() * s.phi / (s.pr * s.pr)}; }
  double residual(const StatePoint& s) const noexcept {
    double rhs = nr() * s.phi;
    return (s.pr * s.qd - rhs) / rhs;
  }
};

/// Curie law M = C B / T with X = M, Y = B.
struct CurieEos {
  double curie_c = 1.0;

  double qd_of(double b, double t) const {
    if (t == 0.0) throw Error(ErrorCode::Singular, "magnetization undefined at T = 0");
    return curie_c * b / t;
  }
  double pr_of(double m, double t) const {
    if (curie_c == 0.0) throw Error(ErrorCode::Singular, "field undefined for zero Curie constant");
    return m * t / curie_c;
  }
  double phi_of(double m, double b) const {
    if (m == 0.0) throw Error(ErrorCode::Singular, "temperature undefined at zero magnetization");
    return curie_c * b / m;
  }

  Partials partials(const StatePoint& s) const noexcept {
    return {-curie_c * s.pr / (s.phi * s.phi), curie_c / s.phi};
  }
  double residual(const StatePoint& s) const noexcept {
    double rhs = curie_c * s.pr;
    return (s.qd * s.phi - rhs) / rhs;
  }
};

static_assert(EosModel<LinearElasticityEos>);
static_assert(EosModel<IdealAnalogEos>);
static_assert(EosModel<IdealGasEos>);
static_assert(EosModel<CurieEos>);

}  // namespace thermoecon::eos
