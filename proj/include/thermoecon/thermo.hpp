#pragma once

// Work, heat, wealth and entropy bookkeeping along constrained paths on an EoS
// surface, plus zeroth-law contact and surplus measures.
//
// Sign conventions: work is dW = -Pr dQd (negative when consumers spend),
// generalized utility (heat) is what remains of the wealth change
// N dphi after work, and the reversible entropy increment is heat / phi.
//
// Paths are parameterized by the one coordinate that moves freely under the
// process constraint and integrated with the composite trapezoid rule.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "thermoecon/core.hpp"
#include "thermoecon/eos.hpp"
#include "thermoecon/error.hpp"
#include "thermoecon/kvdoc.hpp"

namespace thermoecon::thermo {

using eos::EosModel;

enum class ProcessKind {
  Isothermal,   // phi fixed
  Isobaric,     // Pr fixed
  IsoQuantity,  // Qd fixed, zero work
  Adiabatic,    // zero heat: N dphi + Pr dQd = 0
};

constexpr const char* to_string(ProcessKind k) noexcept {
  switch (k) {
    case ProcessKind::Isothermal: return "isothermal";
    case ProcessKind::Isobaric: return "isobaric";
    case ProcessKind::IsoQuantity: return "isoquantity";
    case ProcessKind::Adiabatic: return "adiabatic";
  }
  return "?";
}

inline constexpr int kDefaultSteps = 10000;
inline constexpr double kSurfaceTolerance = 1e-9;
inline constexpr double kConstraintTolerance = 1e-12;

/// Whether N dphi + Pr dQd has integrating factor 1/phi for this model, i.e.
/// whether entropy is a state function on its surface.
template <class M>
inline constexpr bool entropy_is_state_function = false;
template <>
inline constexpr bool entropy_is_state_function<eos::IdealAnalogEos> = true;

template <EosModel M>
struct ProcessPath {
  M model;
  Population n = 1;
  ProcessKind kind = ProcessKind::Isothermal;
  StatePoint start;
  StatePoint end;
  int steps = kDefaultSteps;
};

/// One quadrature node: position plus derivatives w.r.t. the path parameter.
struct PathSample {
  StatePoint point;
  double dqd_ds = 0.0;
  double dphi_ds = 0.0;
};

struct PathResult {
  Money work = 0.0;
  Money heat = 0.0;
  Money wealth_change = 0.0;
  Entropy entropy_change = 0.0;
  bool entropy_path_dependent = false;
};

namespace detail {

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

template <class F>
double trapezoid(const std::vector<PathSample>& samples, double h, F&& integrand) {
  if (samples.size() < 2) return 0.0;
  double sum = 0.5 * (integrand(samples.front()) + integrand(samples.back()));
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) sum += integrand(samples[i]);
  return sum * h;
}

inline double node(double a, double b, int k, int steps) {
  if (k == steps) return b;
  return a + (b - a) * static_cast<double>(k) / static_cast<double>(steps);
}

/// Implicit-trapezoid march along the zero-heat curve dphi/dQd = -Pr / N.
/// Each step satisfies N (phi1 - phi0) = -(h/2)(Pr0 + Pr1) to convergence, so
/// trapezoid work along the traced curve equals the wealth change.
template <EosModel M>
std::vector<PathSample> trace_adiabat(const M& model, Population n, const StatePoint& start, GoodsQty qd_end,
                                      int steps) {
  const double nn = static_cast<double>(n);
  const double h = (qd_end - start.qd) / steps;
  std::vector<PathSample> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  double phi = start.phi;
  double carry = 0.0;  // Kahan compensation for the running phi
  double pr = model.pr_of(start.qd, phi);
  out.push_back({{start.qd, pr, phi}, 1.0, -pr / nn});
  for (int k = 1; k <= steps; ++k) {
    const double q1 = node(start.qd, qd_end, k, steps);
    double d = -h * pr / nn;
    bool converged = false;
    double prev_delta = HUGE_VAL;
    for (int it = 0; it < 200; ++it) {
      if (!(phi + d > 0.0)) throw Error(ErrorCode::Domain, "adiabat leaves positive-wealth region");
      const double next = -0.5 * h * (pr + model.pr_of(q1, phi + d)) / nn;
      const double delta = std::abs(next - d);
      d = next;
      const double scale = std::abs(d);
      // Stop at machine precision, or once rounding noise stops the contraction.
      if (delta <= 4e-16 * scale || (delta >= prev_delta && delta <= 1e-12 * scale)) {
        converged = true;
        break;
      }
      prev_delta = delta;
    }
    if (!converged) throw Error(ErrorCode::Domain, "adiabat step did not converge; increase steps");
    const double y = d - carry;
    const double t = phi + y;
    carry = (t - phi) - y;
    phi = t;
    if (!(phi > 0.0)) throw Error(ErrorCode::Domain, "adiabat leaves positive-wealth region");
    pr = model.pr_of(q1, phi);
    out.push_back({{q1, pr, phi}, 1.0, -pr / nn});
  }
  return out;
}

template <EosModel M>
double free_start(const ProcessPath<M>& p) {
  return (p.kind == ProcessKind::Isothermal || p.kind == ProcessKind::Adiabatic) ? p.start.qd : p.start.phi;
}
template <EosModel M>
double free_end(const ProcessPath<M>& p) {
  return (p.kind == ProcessKind::Isothermal || p.kind == ProcessKind::Adiabatic) ? p.end.qd : p.end.phi;
}

}  // namespace detail

/// Surface point at the given price and wealth.
template <EosModel M>
StatePoint on_surface(const M& model, Price pr, PersonalWealth phi) {
  return {model.qd_of(pr, phi), pr, phi};
}

/// Builds a path from an on-surface start to the point reached by moving the
/// free coordinate to `target`: Qd for isothermal and adiabatic paths, phi for
/// isobaric and iso-quantity paths.
template <EosModel M>
ProcessPath<M> make_path(const M& model, Population n, ProcessKind kind, const StatePoint& start, double target,
                         int steps = kDefaultSteps) {
  ProcessPath<M> p{model, n, kind, start, start, steps};
  if (steps < 1) throw Error(ErrorCode::Domain, "steps must be >= 1");
  if (n < 1) throw Error(ErrorCode::InvalidState, "population below 1");
  switch (kind) {
    case ProcessKind::Isothermal:
      p.end = {target, model.pr_of(target, start.phi), start.phi};
      break;
    case ProcessKind::Isobaric:
      p.end = {model.qd_of(start.pr, target), start.pr, target};
      break;
    case ProcessKind::IsoQuantity:
      p.end = {start.qd, model.pr_of(start.qd, target), target};
      break;
    case ProcessKind::Adiabatic:
      p.end = detail::trace_adiabat(model, n, start, target, steps).back().point;
      break;
  }
  return p;
}

/// Throws OffSurface / Constraint / InvalidState when the path is unusable.
template <EosModel M>
void validate_path(const ProcessPath<M>& p) {
  if (p.steps < 1) throw Error(ErrorCode::Domain, "steps must be >= 1");
  if (p.n < 1) throw Error(ErrorCode::InvalidState, "population below 1");
  require_valid(p.start);
  require_valid(p.end);
  for (const auto* pt : {&p.start, &p.end}) {
    const double r = p.model.residual(*pt);
    if (!(std::abs(r) <= kSurfaceTolerance)) {
      throw Error(ErrorCode::OffSurface, "endpoint off the EoS surface (residual " + format_number(r) + ")");
    }
  }
  bool ok = true;
  switch (p.kind) {
    case ProcessKind::Isothermal: ok = detail::close_rel(p.start.phi, p.end.phi, kConstraintTolerance); break;
    case ProcessKind::Isobaric: ok = detail::close_rel(p.start.pr, p.end.pr, kConstraintTolerance); break;
    case ProcessKind::IsoQuantity: ok = detail::close_rel(p.start.qd, p.end.qd, kConstraintTolerance); break;
    case ProcessKind::Adiabatic: {
      auto reached = detail::trace_adiabat(p.model, p.n, p.start, p.end.qd, p.steps).back().point;
      ok = detail::close_rel(reached.phi, p.end.phi, kSurfaceTolerance);
      break;
    }
  }
  if (!ok) throw Error(ErrorCode::Constraint, std::string(to_string(p.kind)) + " constraint violated by endpoints");
}

/// Quadrature nodes along the path, steps + 1 of them.
template <EosModel M>
std::vector<PathSample> trace(const ProcessPath<M>& p) {
  validate_path(p);
  if (p.kind == ProcessKind::Adiabatic) return detail::trace_adiabat(p.model, p.n, p.start, p.end.qd, p.steps);

  const double a = detail::free_start(p);
  const double b = detail::free_end(p);
  std::vector<PathSample> out;
  out.reserve(static_cast<std::size_t>(p.steps) + 1);
  for (int k = 0; k <= p.steps; ++k) {
    const double s = detail::node(a, b, k, p.steps);
    PathSample smp;
    switch (p.kind) {
      case ProcessKind::Isothermal:
        smp.point = {s, p.model.pr_of(s, p.start.phi), p.start.phi};
        smp.dqd_ds = 1.0;
        break;
      case ProcessKind::Isobaric:
        smp.point = {p.model.qd_of(p.start.pr, s), p.start.pr, s};
        smp.dqd_ds = p.model.partials(smp.point).dqd_dphi;
        smp.dphi_ds = 1.0;
        break;
      case ProcessKind::IsoQuantity:
        smp.point = {p.start.qd, p.model.pr_of(p.start.qd, s), s};
        smp.dphi_ds = 1.0;
        break;
      case ProcessKind::Adiabatic: break;
    }
    if (!(smp.point.phi > 0.0)) throw Error(ErrorCode::Domain, "non-positive personal wealth on path");
    out.push_back(smp);
  }
  return out;
}

template <EosModel M>
double step_size(const ProcessPath<M>& p) {
  return (detail::free_end(p) - detail::free_start(p)) / p.steps;
}

/// Closed-form -int Pr dQd at fixed phi, where the model has one.
inline std::optional<Money> isothermal_work_closed_form(const eos::LinearElasticityEos& m, PersonalWealth phi,
                                                        GoodsQty qa, GoodsQty qb) {
  if (m.kappa_phi == 0.0) return std::nullopt;
  // Pr(Q) = c - Q / (q0 kappa)
  const double c = m.pr0 + (1.0 + m.beta_pr * (phi - m.phi0)) / m.kappa_phi;
  const double integral = c * (qb - qa) - (qb * qb - qa * qa) / (2.0 * m.q0 * m.kappa_phi);
  return -integral;
}

inline std::optional<Money> isothermal_work_closed_form(const eos::IdealAnalogEos& m, PersonalWealth phi,
                                                        GoodsQty qa, GoodsQty qb) {
  return -static_cast<double>(m.n) * phi * std::log(qb / qa);
}

/// -int Pr dQd by trapezoid quadrature, regardless of closed forms.
template <EosModel M>
Money work_quadrature(const ProcessPath<M>& p) {
  auto samples = trace(p);
  return -detail::trapezoid(samples, step_size(p), [](const PathSample& s) { return s.point.pr * s.dqd_ds; });
}

/// Work -int Pr dQd. Uses the exact value where the integrand is elementary
/// (constant Qd, constant Pr, or an isothermal leg with a closed form);
/// trapezoid quadrature otherwise.
template <EosModel M>
Money work_along(const ProcessPath<M>& p) {
  validate_path(p);
  switch (p.kind) {
    case ProcessKind::IsoQuantity: return 0.0;
    case ProcessKind::Isobaric: return -p.start.pr * (p.end.qd - p.start.qd);
    case ProcessKind::Isothermal:
      if constexpr (requires { isothermal_work_closed_form(p.model, 1.0, 1.0, 1.0); }) {
        if (auto w = isothermal_work_closed_form(p.model, p.start.phi, p.start.qd, p.end.qd)) return *w;
      }
      break;
    case ProcessKind::Adiabatic: break;
  }
  return work_quadrature(p);
}

/// N (phi_end - phi_start).
template <EosModel M>
Money wealth_change(const ProcessPath<M>& p) {
  validate_path(p);
  return total_wealth(p.n, p.end.phi) - total_wealth(p.n, p.start.phi);
}

/// First law: heat = wealth change - work.
template <EosModel M>
Money heat_along(const ProcessPath<M>& p) {
  return wealth_change(p) - work_along(p);
}

/// Direct quadrature of the heat form N dphi + Pr dQd; an independent route
/// to heat_along.
template <EosModel M>
Money heat_quadrature(const ProcessPath<M>& p) {
  auto samples = trace(p);
  const double nn = static_cast<double>(p.n);
  return detail::trapezoid(samples, step_size(p),
                           [nn](const PathSample& s) { return nn * s.dphi_ds + s.point.pr * s.dqd_ds; });
}

/// Reversible entropy change int (N dphi + Pr dQd) / phi.
template <EosModel M>
Entropy entropy_change(const ProcessPath<M>& p) {
  auto samples = trace(p);
  const double nn = static_cast<double>(p.n);
  return detail::trapezoid(samples, step_size(p), [nn](const PathSample& s) {
    return (nn * s.dphi_ds + s.point.pr * s.dqd_ds) / s.point.phi;
  });
}

template <EosModel M>
PathResult evaluate(const ProcessPath<M>& p) {
  PathResult r;
  r.work = work_along(p);
  r.wealth_change = wealth_change(p);
  r.heat = r.wealth_change - r.work;
  r.entropy_change = entropy_change(p);
  r.entropy_path_dependent = !entropy_is_state_function<M>;
  return r;
}

struct SecondLawCheck {
  bool holds = false;
  Entropy slack = 0.0;  // claimed minus reversible integral
};

/// A claimed entropy change is admissible when it is at least the reversible
/// integral along the path.
template <EosModel M>
SecondLawCheck second_law_check(Entropy claimed_delta_s, const ProcessPath<M>& p, double tolerance = 1e-9) {
  const double integral = entropy_change(p);
  const double slack = claimed_delta_s - integral;
  return {slack >= -tolerance * std::max(1.0, std::abs(integral)), slack};
}

struct Rectangle {
  PersonalWealth phi_lo = 0.0;
  PersonalWealth phi_hi = 0.0;
  GoodsQty q_lo = 0.0;
  GoodsQty q_hi = 0.0;
};

/// Closed-loop integral of heat / phi around a rectangle in the (phi, Qd)
/// plane, traversed with iso-phi and iso-Qd legs. Zero iff the heat form is
/// exact on this patch of the surface.
template <EosModel M>
Entropy cycle_entropy_defect(const M& model, Population n, const Rectangle& r, int steps = kDefaultSteps) {
  if (!(r.phi_lo > 0.0) || !(r.phi_hi > 0.0) || r.q_lo < 0.0 || r.q_hi < 0.0) {
    throw Error(ErrorCode::Domain, "rectangle outside positive-wealth, nonnegative-demand region");
  }
  auto corner = [&](double q, double phi) { return StatePoint{q, model.pr_of(q, phi), phi}; };
  const StatePoint a = corner(r.q_lo, r.phi_lo);
  const StatePoint b = corner(r.q_hi, r.phi_lo);
  const StatePoint c = corner(r.q_hi, r.phi_hi);
  const StatePoint d = corner(r.q_lo, r.phi_hi);
  using enum ProcessKind;
  return entropy_change(ProcessPath<M>{model, n, Isothermal, a, b, steps}) +
         entropy_change(ProcessPath<M>{model, n, IsoQuantity, b, c, steps}) +
         entropy_change(ProcessPath<M>{model, n, Isothermal, c, d, steps}) +
         entropy_change(ProcessPath<M>{model, n, IsoQuantity, d, a, steps});
}

struct Relaxation {
  double rate = 1.0;
  double horizon = 10.0;
  int samples = 100;
};

struct ContactSample {
  double t = 0.0;
  PersonalWealth phi_a = 0.0;
  PersonalWealth phi_b = 0.0;
};

struct ContactResult {
  PersonalWealth phi_star = 0.0;
  std::vector<ContactSample> trajectory;
};

/// Wealth contact between two groups. Both relax exponentially at the same
/// rate toward the population-weighted mean, which keeps N_a phi_a + N_b phi_b
/// constant along the trajectory.
inline ContactResult thermal_contact(const SystemState& a, const SystemState& b,
                                     std::optional<Relaxation> relaxation = std::nullopt) {
  require_valid(a);
  require_valid(b);
  const double na = static_cast<double>(a.n);
  const double nb = static_cast<double>(b.n);
  ContactResult out;
  out.phi_star = (total_wealth(a) + total_wealth(b)) / (na + nb);
  if (!relaxation) return out;

  const auto& rx = *relaxation;
  if (!(rx.rate > 0.0) || !(rx.horizon >= 0.0) || rx.samples < 1) {
    throw Error(ErrorCode::Domain, "relaxation needs rate > 0, horizon >= 0, samples >= 1");
  }
  out.trajectory.reserve(static_cast<std::size_t>(rx.samples) + 1);
  const double da = a.point.phi - out.phi_star;
  const double db = b.point.phi - out.phi_star;
  for (int k = 0; k <= rx.samples; ++k) {
    const double t = rx.horizon * k / rx.samples;
    const double decay = std::exp(-rx.rate * t);
    out.trajectory.push_back({t, out.phi_star + da * decay, out.phi_star + db * decay});
  }
  return out;
}

struct Equilibrium {
  Price pr_star = 0.0;
  PersonalWealth phi_star = 0.0;
};

struct SurplusReport {
  std::optional<Money> classical;  // unset when no finite choke price exists
  Money generalized = 0.0;
  Money total_generalized_utility = 0.0;
  Money total_expenditure = 0.0;
  GoodsQty qd_star = 0.0;
  std::optional<Price> choke_price;
};

/// Psi = phi* S* - Pr* Qd*.
inline SurplusReport generalized_surplus(PersonalWealth phi_star, Entropy s_star, Price pr_star, GoodsQty qd_star) {
  SurplusReport r;
  r.qd_star = qd_star;
  r.total_generalized_utility = phi_star * s_star;
  r.total_expenditure = pr_star * qd_star;
  r.generalized = r.total_generalized_utility - r.total_expenditure;
  return r;
}

/// Demand curve Qd(Pr) at fixed wealth, sampled from pr_star to the choke
/// price; empty when the model has none.
template <EosModel M>
std::vector<StatePoint> demand_curve(const M& model, const Equilibrium& eq, int steps = kDefaultSteps) {
  std::vector<StatePoint> out;
  if constexpr (requires { model.choke_price(1.0); }) {
    auto choke = model.choke_price(eq.phi_star);
    if (!choke || *choke < eq.pr_star) return out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k) {
      const double pr = detail::node(eq.pr_star, *choke, k, steps);
      // The last node is the choke price itself, where demand is zero by definition.
      const double q = k == steps ? 0.0 : model.qd_of(pr, eq.phi_star);
      out.push_back({q, pr, eq.phi_star});
    }
  }
  return out;
}

/// Classical surplus (area under the demand curve above Pr*, trapezoid) next
/// to the generalized surplus.
template <EosModel M>
SurplusReport surplus(const M& model, const Equilibrium& eq, Entropy s_star, int steps = kDefaultSteps) {
  if (steps < 1) throw Error(ErrorCode::Domain, "steps must be >= 1");
  require_valid(StatePoint{0.0, eq.pr_star, eq.phi_star});
  const GoodsQty qd_star = model.qd_of(eq.pr_star, eq.phi_star);
  SurplusReport r = generalized_surplus(eq.phi_star, s_star, eq.pr_star, qd_star);
  if constexpr (requires { model.choke_price(1.0); }) {
    r.choke_price = model.choke_price(eq.phi_star);
  }
  auto curve = demand_curve(model, eq, steps);
  if (r.choke_price && !curve.empty()) {
    const double h = (*r.choke_price - eq.pr_star) / steps;
    double sum = 0.5 * (curve.front().qd + curve.back().qd);
    for (std::size_t i = 1; i + 1 < curve.size(); ++i) sum += curve[i].qd;
    r.classical = sum * h;
  }
  return r;
}

inline KvDoc to_kv(const PathResult& r) {
  KvDoc d;
  d.set("work", r.work);
  d.set("heat", r.heat);
  d.set("wealth_change", r.wealth_change);
  d.set("entropy_change", r.entropy_change);
  if (r.entropy_path_dependent) d.set("warning", "entropy_path_dependent");
  return d;
}

inline KvDoc to_kv(const SurplusReport& r) {
  KvDoc d;
  if (r.classical) {
    d.set("classical", *r.classical);
  } else {
    d.set("classical", "undefined");
  }
  d.set("generalized", r.generalized);
  d.set("total_generalized_utility", r.total_generalized_utility);
  d.set("total_expenditure", r.total_expenditure);
  d.set("qd_star", r.qd_star);
  if (r.choke_price) d.set("choke_price", *r.choke_price);
  return d;
}

}  // namespace thermoecon::thermo
