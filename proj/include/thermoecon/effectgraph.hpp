#pragma once

// Effect-structure diagrams: directed graphs over the three EoS coordinates
// whose arrows are direct cause-effect channels. A diagram qualifies an
// empirical law for EoS status when it has exactly three arrows, contains
// Y -> X, and does not route exogenous shocks into X.

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "thermoecon/error.hpp"

namespace thermoecon::effectgraph {

enum class Node { X, Y, T };

inline constexpr std::array<Node, 3> kAllNodes{Node::X, Node::Y, Node::T};

constexpr char node_char(Node n) noexcept {
  switch (n) {
    case Node::X: return 'X';
    case Node::Y: return 'Y';
    case Node::T: return 'T';
  }
  return '?';
}

struct Edge {
  Node from;
  Node to;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// All six ordered pairs of distinct nodes, in canonical order.
inline constexpr std::array<Edge, 6> kAllEdges{{
    {Node::X, Node::Y}, {Node::X, Node::T}, {Node::Y, Node::X},
    {Node::Y, Node::T}, {Node::T, Node::X}, {Node::T, Node::Y},
}};

struct EffectDiagram {
  std::set<Edge> edges;
  std::set<Node> shock_targets;

  bool has(Node from, Node to) const { return edges.contains(Edge{from, to}); }
  bool has_pair(Node a, Node b) const { return has(a, b) && has(b, a); }

  friend bool operator==(const EffectDiagram&, const EffectDiagram&) = default;
  friend auto operator<=>(const EffectDiagram&, const EffectDiagram&) = default;
};

enum class DiagramClass { ClassI, ClassII, ClassIII_1, ClassIII_2, ClassIII_3, ClassIII_4, OtherValid };

constexpr std::string_view to_string(DiagramClass c) noexcept {
  switch (c) {
    case DiagramClass::ClassI: return "I";
    case DiagramClass::ClassII: return "II";
    case DiagramClass::ClassIII_1: return "III.1";
    case DiagramClass::ClassIII_2: return "III.2";
    case DiagramClass::ClassIII_3: return "III.3";
    case DiagramClass::ClassIII_4: return "III.4";
    case DiagramClass::OtherValid: return "other-valid";
  }
  return "?";
}

struct Violation {
  int rule;  // 1, 2 or 3
  std::string description;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const noexcept { return violations.empty(); }
};

using AliasMap = std::map<std::string, Node, std::less<>>;

/// Hydrostatic (P,V,T), demand-side (Pr,Qd,phi) and magnetic (B,M,T) names.
inline const AliasMap& builtin_aliases() {
  static const AliasMap m{
      {"X", Node::X},  {"Y", Node::Y},  {"T", Node::T},   {"P", Node::Y},
      {"V", Node::X},  {"Pr", Node::Y}, {"Qd", Node::X},  {"phi", Node::T},
      {"B", Node::Y},  {"M", Node::X},
  };
  return m;
}

/// Display names used when exporting.
struct NodeLabels {
  std::string x = "X";
  std::string y = "Y";
  std::string t = "T";

  const std::string& operator()(Node n) const {
    switch (n) {
      case Node::X: return x;
      case Node::Y: return y;
      case Node::T: return t;
    }
    return x;
  }

  static NodeLabels hydrostatic() { return {"V", "P", "T"}; }
  static NodeLabels magnetic() { return {"M", "B", "T"}; }
  static NodeLabels demand() { return {"Qd", "Pr", "phi"}; }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline Node resolve(std::string_view name, const AliasMap& aliases) {
  name = trim(name);
  if (name.empty()) throw Error(ErrorCode::Parse, "empty node name");
  if (auto it = aliases.find(name); it != aliases.end()) return it->second;
  if (name == "X") return Node::X;
  if (name == "Y") return Node::Y;
  if (name == "T") return Node::T;
  throw Error(ErrorCode::UnknownName, "unknown node name '" + std::string(name) + "'");
}

inline std::size_t find_ci(std::string_view hay, std::string_view needle) {
  if (needle.size() > hay.size()) return std::string_view::npos;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < needle.size() && ok; ++j) {
      ok = std::tolower(static_cast<unsigned char>(hay[i + j])) == needle[j];
    }
    if (ok) return i;
  }
  return std::string_view::npos;
}

}  // namespace detail

/// Parses "A->B, C->D[; shocks: A, B]". Duplicate edges collapse.
inline EffectDiagram parse_diagram(std::string_view text, const AliasMap& aliases = builtin_aliases()) {
  EffectDiagram d;
  std::string_view edge_part = text;
  std::string_view shock_part;
  bool has_shocks = false;
  if (auto pos = detail::find_ci(text, "shocks:"); pos != std::string_view::npos) {
    edge_part = text.substr(0, pos);
    shock_part = text.substr(pos + 7);
    has_shocks = true;
  }
  edge_part = detail::trim(edge_part);
  while (!edge_part.empty() && (edge_part.back() == ';' || edge_part.back() == ',')) {
    edge_part.remove_suffix(1);
    edge_part = detail::trim(edge_part);
  }

  if (!edge_part.empty()) {
    for (auto term : detail::split(edge_part, ',')) {
      term = detail::trim(term);
      auto arrow = term.find("->");
      if (term.empty() || arrow == std::string_view::npos) {
        throw Error(ErrorCode::Parse, "malformed edge term '" + std::string(term) + "'");
      }
      auto rhs = term.substr(arrow + 2);
      if (rhs.find("->") != std::string_view::npos) {
        throw Error(ErrorCode::Parse, "chained arrows in term '" + std::string(term) + "'");
      }
      Node from = detail::resolve(term.substr(0, arrow), aliases);
      Node to = detail::resolve(rhs, aliases);
      if (from == to) {
        throw Error(ErrorCode::SelfLoop, "self-loop on " + std::string(1, node_char(from)));
      }
      d.edges.insert(Edge{from, to});
    }
  }

  if (has_shocks) {
    shock_part = detail::trim(shock_part);
    if (!shock_part.empty()) {
      for (auto name : detail::split(shock_part, ',')) d.shock_targets.insert(detail::resolve(name, aliases));
    }
  }
  return d;
}

/// Reports every violated rule, not just the first.
inline ValidationReport validate(const EffectDiagram& d) {
  ValidationReport r;
  if (d.edges.size() != 3) {
    r.violations.push_back({1, "number of arrows is " + std::to_string(d.edges.size()) + ", must be three"});
  }
  if (!d.has(Node::Y, Node::X)) {
    r.violations.push_back({2, "no arrow pointing Y->X"});
  }
  if (d.shock_targets.contains(Node::X)) {
    r.violations.push_back({3, "X can not take exogenous effect"});
  }
  return r;
}

/// Rules 1 and 2 leave room for at most one opposite-direction pair, so the
/// class is unique. Throws the code of the first violated rule otherwise.
inline DiagramClass classify(const EffectDiagram& d) {
  auto report = validate(d);
  if (!report.valid()) {
    const auto& v = report.violations.front();
    auto code = v.rule == 1 ? ErrorCode::Rule1 : v.rule == 2 ? ErrorCode::Rule2 : ErrorCode::Rule3;
    throw Error(code, "cannot classify invalid diagram: " + v.description);
  }
  using enum Node;
  if (d.has_pair(T, Y)) return DiagramClass::ClassI;
  if (d.has_pair(T, X)) return DiagramClass::ClassII;
  if (d.has_pair(Y, X)) {
    if (d.has(T, X)) return DiagramClass::ClassIII_1;
    if (d.has(X, T)) return DiagramClass::ClassIII_2;
    if (d.has(T, Y)) return DiagramClass::ClassIII_3;
    return DiagramClass::ClassIII_4;
  }
  return DiagramClass::OtherValid;
}

/// Every three-arrow diagram satisfying rules 1-2 with no shock targets,
/// in canonical order.
inline std::vector<EffectDiagram> enumerate_valid() {
  std::vector<EffectDiagram> out;
  for (unsigned mask = 0; mask < (1u << kAllEdges.size()); ++mask) {
    if (std::popcount(mask) != 3) continue;
    EffectDiagram d;
    for (std::size_t i = 0; i < kAllEdges.size(); ++i) {
      if (mask & (1u << i)) d.edges.insert(kAllEdges[i]);
    }
    if (validate(d).valid()) out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Canonical text form, accepted back by parse_diagram.
inline std::string to_text(const EffectDiagram& d, const NodeLabels& labels = {}) {
  std::string s;
  for (const auto& e : d.edges) {
    if (!s.empty()) s += ", ";
    s += labels(e.from) + "->" + labels(e.to);
  }
  if (!d.shock_targets.empty()) {
    s += "; shocks: ";
    bool first = true;
    for (auto n : d.shock_targets) {
      if (!first) s += ", ";
      s += labels(n);
      first = false;
    }
  }
  return s;
}

/// Graphviz-style export, one sorted line per edge.
inline std::string to_dot(const EffectDiagram& d, const NodeLabels& labels = {}) {
  std::string s = "digraph effect_structure {\n";
  for (const auto& e : d.edges) s += "  \"" + labels(e.from) + "\" -> \"" + labels(e.to) + "\";\n";
  for (auto n : d.shock_targets) s += "  \"" + labels(n) + "\" [shock=true];\n";
  s += "}\n";
  return s;
}

}  // namespace thermoecon::effectgraph
