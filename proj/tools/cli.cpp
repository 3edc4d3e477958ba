#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermoecon/thermoecon.hpp"

namespace thermoecon::cli {
namespace {

namespace eg = effectgraph;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::Parse:
    case ErrorCode::UnknownName:
    case ErrorCode::SelfLoop:
    case ErrorCode::Io:
      return 2;
    default:
      return 1;
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  return f;
}

// ---- EoS parameters: --params file, overridden by individual flags ----

struct LinearParams {
  std::string file;
  std::optional<double> q0, pr0, phi0, beta_pr, kappa_phi;

  void attach(CLI::App* sub) {
    sub->add_option("--params", file, "Parameter document (key=value lines)");
    sub->add_option("--q0", q0, "Baseline demand");
    sub->add_option("--pr0", pr0, "Baseline price");
    sub->add_option("--phi0", phi0, "Baseline personal wealth");
    sub->add_option("--beta-pr", beta_pr, "Wealth coefficient");
    sub->add_option("--kappa-phi", kappa_phi, "Price coefficient");
  }

  eos::LinearElasticityEos resolve() const {
    std::map<std::string, double> v;
    if (!file.empty()) {
      std::ifstream f(file);
      if (!f) throw Error(ErrorCode::Io, "cannot open parameter file '" + file + "'");
      auto doc = KvDoc::parse(f);
      for (const auto& [k, val] : doc.items()) {
        if (k != "q0" && k != "pr0" && k != "phi0" && k != "beta_pr" && k != "kappa_phi") {
          throw Error(ErrorCode::Parse, "unknown parameter key '" + k + "'");
        }
        v[k] = parse_number(val);
      }
    }
    auto take = [&](const char* key, const std::optional<double>& flag) {
      if (flag) v[key] = *flag;
      auto it = v.find(key);
      if (it == v.end()) throw UsageError(std::string("missing EoS parameter '") + key + "'");
      return it->second;
    };
    auto m = eos::LinearElasticityEos{take("q0", q0), take("pr0", pr0), take("phi0", phi0),
                                      take("beta_pr", beta_pr), take("kappa_phi", kappa_phi)};
    m.require_invariants();
    return m;
  }
};

struct ModelChoice {
  std::string name = "linear";
  Population population = 1;
  LinearParams linear;

  void attach(CLI::App* sub) {
    sub->add_option("--model", name, "EoS model")->check(CLI::IsMember({"linear", "ideal-analog"}));
    sub->add_option("--population", population, "Number of consumers N")->check(CLI::PositiveNumber);
    linear.attach(sub);
  }

  template <class F>
  void visit(F&& f) const {
    if (name == "ideal-analog") {
      f(eos::IdealAnalogEos{population});
    } else {
      f(linear.resolve());
    }
  }
};

std::string diagram_text(const std::string& edges, const std::string& shocks) {
  return shocks.empty() ? edges : edges + "; shocks: " + shocks;
}

eg::NodeLabels labels_for(const std::string& name) {
  if (name == "demand") return eg::NodeLabels::demand();
  if (name == "hydrostatic") return eg::NodeLabels::hydrostatic();
  if (name == "magnetic") return eg::NodeLabels::magnetic();
  return {};
}

ErrorCode rule_code(int rule) {
  return rule == 1 ? ErrorCode::Rule1 : rule == 2 ? ErrorCode::Rule2 : ErrorCode::Rule3;
}

thermo::ProcessKind parse_kind(const std::string& s) {
  using enum thermo::ProcessKind;
  if (s == "isothermal") return Isothermal;
  if (s == "isobaric") return Isobaric;
  if (s == "isoquantity") return IsoQuantity;
  return Adiabatic;
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thermodynamic demand-side economics engine", "thermoecon"};
  app.set_version_flag("--version", std::string("thermoecon ") + kVersion);
  app.require_subcommand(1);

  // diagram-validate / diagram-classify
  std::string edges, shocks, labels = "xyt", dot_out;
  auto* dv = app.add_subcommand("diagram-validate", "Check a diagram against the three EoS rules");
  auto* dc = app.add_subcommand("diagram-classify", "Classify a valid diagram (I, II, III.1-4, other-valid)");
  for (auto* sub : {dv, dc}) {
    sub->add_option("--edges", edges, "Edge list, e.g. \"P->T,T->P,P->V\"")->required();
    sub->add_option("--shocks", shocks, "Comma-separated exogenous-shock targets");
  }
  dc->add_option("--out", dot_out, "Write a DOT rendering to this file");
  auto* de = app.add_subcommand("diagram-enumerate", "List every diagram satisfying rules 1-2");
  for (auto* sub : {dc, de}) {
    sub->add_option("--labels", labels, "Node labels")->check(CLI::IsMember({"xyt", "demand", "hydrostatic", "magnetic"}));
  }

  // eos-eval / eos-invert
  LinearParams eval_params, invert_params;
  double ev_pr = 0.0, ev_phi = 0.0;
  auto* ee = app.add_subcommand("eos-eval", "Evaluate demand on the linear EoS surface");
  eval_params.attach(ee);
  ee->add_option("--pr", ev_pr, "Price")->required();
  ee->add_option("--phi", ev_phi, "Personal wealth")->required();

  std::string solve_for;
  std::optional<double> inv_qd, inv_pr, inv_phi;
  auto* ei = app.add_subcommand("eos-invert", "Solve the linear EoS for one coordinate");
  invert_params.attach(ei);
  ei->add_option("--solve-for", solve_for, "Coordinate to solve for")
      ->required()
      ->check(CLI::IsMember({"qd", "pr", "phi"}));
  ei->add_option("--qd", inv_qd, "Demand quantity");
  ei->add_option("--pr", inv_pr, "Price");
  ei->add_option("--phi", inv_phi, "Personal wealth");

  // fit
  std::string data_path = "-", fit_out;
  std::optional<double> fq0, fpr0, fphi0;
  auto* ft = app.add_subcommand("fit", "Estimate beta_pr and kappa_phi from a qd,pr,phi dataset");
  ft->add_option("--data", data_path, "Dataset path, '-' for standard input");
  ft->add_option("--q0", fq0, "Baseline demand (default: sample mean)");
  ft->add_option("--pr0", fpr0, "Baseline price (default: sample mean)");
  ft->add_option("--phi0", fphi0, "Baseline wealth (default: sample mean)");
  ft->add_option("--out", fit_out, "Write per-row residuals to this file");

  // gen-data
  LinearParams gen_params;
  int gen_n = 100;
  double gen_sigma = 0.0;
  std::uint64_t gen_seed = 1;
  std::optional<double> phi_min, phi_max, pr_min, pr_max;
  std::string gen_out;
  auto* gd = app.add_subcommand("gen-data", "Generate a synthetic dataset from the linear EoS");
  gen_params.attach(gd);
  gd->add_option("--n", gen_n, "Number of observations")->check(CLI::PositiveNumber);
  gd->add_option("--sigma", gen_sigma, "Relative noise standard deviation")->check(CLI::NonNegativeNumber);
  gd->add_option("--seed", gen_seed, "Random seed");
  gd->add_option("--phi-min", phi_min, "Lower wealth bound (default 0.8 phi0)");
  gd->add_option("--phi-max", phi_max, "Upper wealth bound (default 1.2 phi0)");
  gd->add_option("--pr-min", pr_min, "Lower price bound (default 0.8 pr0)");
  gd->add_option("--pr-max", pr_max, "Upper price bound (default 1.2 pr0)");
  gd->add_option("--out", gen_out, "Output path (default: standard output)");

  // simulate
  ModelChoice sim_model;
  std::string sim_kind;
  double sim_pr = 0.0, sim_phi = 0.0, sim_target = 0.0;
  int sim_steps = thermo::kDefaultSteps;
  std::string sim_out;
  auto* sm = app.add_subcommand("simulate", "Integrate work, heat and entropy along a process path");
  sim_model.attach(sm);
  sm->add_option("--kind", sim_kind, "Process kind")
      ->required()
      ->check(CLI::IsMember({"isothermal", "isobaric", "isoquantity", "adiabatic"}));
  sm->add_option("--pr", sim_pr, "Start price")->required();
  sm->add_option("--phi", sim_phi, "Start personal wealth")->required();
  sm->add_option("--target", sim_target, "End value of the free coordinate (qd or phi)")->required();
  sm->add_option("--steps", sim_steps, "Quadrature steps")->check(CLI::PositiveNumber);
  sm->add_option("--out", sim_out, "Write the path samples (qd,pr,phi) to this file");

  // surplus
  ModelChoice sur_model;
  double pr_star = 0.0, phi_star = 0.0, s_star = 0.0;
  int sur_steps = thermo::kDefaultSteps;
  std::string sur_out;
  auto* su = app.add_subcommand("surplus", "Classical and generalized consumer surplus at an equilibrium");
  sur_model.attach(su);
  su->add_option("--pr-star", pr_star, "Equilibrium price")->required();
  su->add_option("--phi-star", phi_star, "Equilibrium personal wealth")->required();
  su->add_option("--s-star", s_star, "Equilibrium entropy level (relative to a reference)");
  su->add_option("--steps", sur_steps, "Quadrature steps")->check(CLI::PositiveNumber);
  su->add_option("--out", sur_out, "Write the demand curve (pr,qd) to this file");

  // contact
  Population na = 1, nb = 1;
  double phia = 0.0, phib = 0.0, rate = 1.0, horizon = 10.0;
  int samples = 100;
  std::string con_out;
  auto* ct = app.add_subcommand("contact", "Wealth contact between two consumer groups");
  ct->add_option("--na", na, "Population of group a")->required()->check(CLI::PositiveNumber);
  ct->add_option("--phia", phia, "Personal wealth of group a")->required();
  ct->add_option("--nb", nb, "Population of group b")->required()->check(CLI::PositiveNumber);
  ct->add_option("--phib", phib, "Personal wealth of group b")->required();
  ct->add_option("--rate", rate, "Relaxation rate");
  ct->add_option("--horizon", horizon, "Trajectory horizon");
  ct->add_option("--samples", samples, "Trajectory intervals")->check(CLI::PositiveNumber);
  ct->add_option("--out", con_out, "Write trajectories (t,phi per group) to this file");

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "ERR_USAGE: " << e.what() << '\n';
    return 2;
  }

  try {
    KvDoc doc;
    if (dv->parsed()) {
      auto d = eg::parse_diagram(diagram_text(edges, shocks));
      auto report = eg::validate(d);
      doc.set("valid", report.valid());
      doc.set("edges", eg::to_text(d));
      doc.set("violations", static_cast<long long>(report.violations.size()));
      for (const auto& v : report.violations) doc.set("rule_" + std::to_string(v.rule), v.description);
      out << doc;
      if (!report.valid()) {
        const auto& v = report.violations.front();
        err << code_name(rule_code(v.rule)) << ": " << v.description << '\n';
        return 1;
      }
    } else if (dc->parsed()) {
      auto d = eg::parse_diagram(diagram_text(edges, shocks));
      auto cls = eg::classify(d);
      doc.set("class", std::string(eg::to_string(cls)));
      doc.set("edges", eg::to_text(d, labels_for(labels)));
      out << doc;
      if (!dot_out.empty()) open_out(dot_out) << eg::to_dot(d, labels_for(labels));
    } else if (de->parsed()) {
      auto all = eg::enumerate_valid();
      std::map<std::string, int> tally;
      doc.set("count", static_cast<long long>(all.size()));
      for (std::size_t i = 0; i < all.size(); ++i) {
        char idx[8];
        std::snprintf(idx, sizeof idx, "%02zu", i + 1);
        auto cls = std::string(eg::to_string(eg::classify(all[i])));
        doc.set(std::string("diagram_") + idx, eg::to_text(all[i], labels_for(labels)));
        doc.set(std::string("class_") + idx, cls);
        ++tally[cls];
      }
      for (const auto& [cls, n] : tally) doc.set("tally_" + cls, static_cast<long long>(n));
      out << doc;
    } else if (ee->parsed()) {
      auto m = eval_params.resolve();
      StatePoint p{m.qd_of(ev_pr, ev_phi), ev_pr, ev_phi};
      auto parts = m.partials(p);
      auto el = eos::elasticities(m);
      doc.set("qd", p.qd);
      doc.set("pr", p.pr);
      doc.set("phi", p.phi);
      doc.set("residual", m.residual(p));
      doc.set("dqd_dphi", parts.dqd_dphi);
      doc.set("dqd_dpr", parts.dqd_dpr);
      doc.set("e_phi", el.e_phi);
      doc.set("e_pr", el.e_pr);
      out << doc;
    } else if (ei->parsed()) {
      auto m = invert_params.resolve();
      auto need = [](const std::optional<double>& v, const char* flag) {
        if (!v) throw UsageError(std::string("eos-invert needs ") + flag);
        return *v;
      };
      StatePoint p;
      if (solve_for == "qd") {
        p.pr = need(inv_pr, "--pr");
        p.phi = need(inv_phi, "--phi");
        p.qd = m.qd_of(p.pr, p.phi);
      } else if (solve_for == "pr") {
        p.qd = need(inv_qd, "--qd");
        p.phi = need(inv_phi, "--phi");
        p.pr = m.pr_of(p.qd, p.phi);
      } else {
        p.qd = need(inv_qd, "--qd");
        p.pr = need(inv_pr, "--pr");
        p.phi = m.phi_of(p.qd, p.pr);
      }
      doc.set("qd", p.qd);
      doc.set("pr", p.pr);
      doc.set("phi", p.phi);
      doc.set("residual", m.residual(p));
      out << doc;
    } else if (ft->parsed()) {
      std::vector<StatePoint> data;
      if (data_path == "-") {
        data = estimation::read_csv(in);
      } else {
        std::ifstream f(data_path);
        if (!f) throw Error(ErrorCode::Io, "cannot open dataset '" + data_path + "'");
        data = estimation::read_csv(f);
      }
      std::optional<estimation::Baselines> base;
      int given = (fq0 ? 1 : 0) + (fpr0 ? 1 : 0) + (fphi0 ? 1 : 0);
      if (given != 0 && given != 3) throw UsageError("--q0, --pr0 and --phi0 must be given together");
      if (given == 3) base = estimation::Baselines{*fq0, *fpr0, *fphi0};
      auto frame = estimation::build_frame(data, base);
      auto result = estimation::fit(frame);
      out << estimation::to_kv(result);
      if (!fit_out.empty()) {
        auto f = open_out(fit_out);
        f << "row,residual\n";
        for (std::size_t i = 0; i < result.residuals.size(); ++i) {
          f << i << ',' << format_number(result.residuals[i]) << '\n';
        }
      }
    } else if (gd->parsed()) {
      auto m = gen_params.resolve();
      estimation::SamplingRanges r{phi_min.value_or(0.8 * m.phi0), phi_max.value_or(1.2 * m.phi0),
                                   pr_min.value_or(0.8 * m.pr0), pr_max.value_or(1.2 * m.pr0)};
      auto data = estimation::generate_synthetic(m, gen_n, gen_sigma, gen_seed, r);
      if (gen_out.empty()) {
        estimation::write_csv(out, data);
      } else {
        auto f = open_out(gen_out);
        estimation::write_csv(f, data);
        doc.set("rows", static_cast<long long>(data.size()));
        doc.set("seed", std::to_string(gen_seed));
        doc.set("out", gen_out);
        out << doc;
      }
    } else if (sm->parsed()) {
      sim_model.visit([&](const auto& model) {
        const Population n = sim_model.population;
        auto start = thermo::on_surface(model, sim_pr, sim_phi);
        auto path = thermo::make_path(model, n, parse_kind(sim_kind), start, sim_target, sim_steps);
        auto res = thermo::evaluate(path);
        doc.set("kind", thermo::to_string(path.kind));
        doc.set("model", sim_model.name);
        doc.set("population", static_cast<long long>(n));
        doc.set("start_qd", path.start.qd);
        doc.set("start_pr", path.start.pr);
        doc.set("start_phi", path.start.phi);
        doc.set("end_qd", path.end.qd);
        doc.set("end_pr", path.end.pr);
        doc.set("end_phi", path.end.phi);
        const auto result_doc = thermo::to_kv(res);
        for (const auto& [k, v] : result_doc.items()) doc.set(k, v);
        out << doc;
        if (!sim_out.empty()) {
          auto f = open_out(sim_out);
          estimation::write_csv(f, [&] {
            std::vector<StatePoint> pts;
            for (const auto& s : thermo::trace(path)) pts.push_back(s.point);
            return pts;
          }());
        }
      });
    } else if (su->parsed()) {
      sur_model.visit([&](const auto& model) {
        thermo::Equilibrium eq{pr_star, phi_star};
        auto rep = thermo::surplus(model, eq, s_star, sur_steps);
        out << thermo::to_kv(rep);
        if (!rep.classical) err << "warning: no finite choke price; classical surplus undefined\n";
        if (!sur_out.empty()) {
          auto f = open_out(sur_out);
          f << "pr,qd\n";
          for (const auto& p : thermo::demand_curve(model, eq, sur_steps)) {
            f << format_number(p.pr) << ',' << format_number(p.qd) << '\n';
          }
        }
      });
    } else if (ct->parsed()) {
      SystemState a{{0.0, 1.0, phia}, na, std::nullopt};
      SystemState b{{0.0, 1.0, phib}, nb, std::nullopt};
      auto res = thermo::thermal_contact(a, b, thermo::Relaxation{rate, horizon, samples});
      doc.set("phi_star", res.phi_star);
      doc.set("total_wealth", total_wealth(a) + total_wealth(b));
      doc.set("total_wealth_equilibrium", static_cast<double>(na + nb) * res.phi_star);
      out << doc;
      if (!con_out.empty()) {
        auto f = open_out(con_out);
        for (int group = 0; group < 2; ++group) {
          if (group) f << '\n';
          f << "# group=" << (group ? 'b' : 'a') << "\nt,phi\n";
          for (const auto& s : res.trajectory) {
            f << format_number(s.t) << ',' << format_number(group ? s.phi_b : s.phi_a) << '\n';
          }
        }
      }
    }
  } catch (const UsageError& e) {
    err << "ERR_USAGE: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << code_name(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return 0;
}

}  // namespace thermoecon::cli
