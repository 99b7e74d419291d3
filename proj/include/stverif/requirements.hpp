#pragma once
// Verification problems: one invariant property over a CFA network, sourced
// either from an assertion directive or from a requirement pattern.
#include <map>
#include <string>
#include <vector>

#include "stverif/cfa.hpp"

namespace stverif {

struct Property {
  enum class At { Anchor, EndOfCycle };
  At at = At::EndOfCycle;
  ExprPtr expr;          // BOOL; must hold at the designated locations
  int anchor_id = -1;    // valid when at == Anchor
  std::string label;     // directive name or pattern id, for reports
};

// Per-problem switches; populated from the job file by the cli layer.
struct ProblemConfig {
  int bound = 10;  // K, max cycles
  uint64_t max_states = 10'000'000;
  std::string backend = "engine";
  bool reduce_fold = true;
  bool reduce_unreach = true;
  bool reduce_coi = true;
  bool reduce_valueset = false;
};

struct VerificationProblem {
  CfaNetwork net;
  Property property;
  ProblemConfig job;
  std::string provenance;  // human-readable origin of the requirement
};

struct RequirementPattern {
  std::string id;
  std::string description;
  std::vector<std::string> placeholders;
};

inline const std::vector<RequirementPattern>& pattern_catalog() {
  static const std::vector<RequirementPattern> catalog = {
      {"P1",
       "if alpha is true at the end of the cycle, beta must be true at the "
       "end of the same cycle",
       {"alpha", "beta"}},
      {"P2", "beta is always true at the end of the cycle", {"beta"}},
      {"P3", "alpha and beta are never true at the same time at the end of "
             "the cycle",
       {"alpha", "beta"}},
  };
  return catalog;
}

struct ProblemsResult {
  std::vector<VerificationProblem> problems;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return !has_errors(diagnostics); }
};

namespace detail {

struct AnchorInfo {
  int anchor_id;
  std::string name;
  ExprPtr expr;
  Span span;
};

inline void collect_anchor_info(const Automaton& a,
                                std::map<int, AnchorInfo>& out) {
  for (const Location& l : a.locations) {
    if (l.role != LocRole::AssertionAnchor) continue;
    if (out.count(l.anchor_id)) continue;  // inlined copies share the id
    out[l.anchor_id] =
        AnchorInfo{l.anchor_id, l.anchor_name, l.assertion, Span{}};
  }
}

}  // namespace detail

// One problem per assertion directive present in the network, in source
// (anchor id) order. Copies of an anchor created by inlining still count
// as one directive.
inline ProblemsResult assertions_to_problems(const CfaNetwork& net,
                                             const ProblemConfig& cfg = {}) {
  ProblemsResult res;
  std::map<int, detail::AnchorInfo> anchors;
  detail::collect_anchor_info(net.main, anchors);
  for (const Automaton& a : net.callees) detail::collect_anchor_info(a, anchors);

  if (anchors.empty()) {
    res.diagnostics.push_back(Diagnostic{
        Severity::Error, "no assertions present in the verification scope",
        Span{}});
    return res;
  }
  for (const auto& [id, info] : anchors) {
    VerificationProblem p;
    p.net = net;
    p.property.at = Property::At::Anchor;
    p.property.expr = info.expr;
    p.property.anchor_id = id;
    p.property.label = info.name.empty() ? "assert" + std::to_string(id)
                                         : info.name;
    p.job = cfg;
    p.provenance = "assertion " + p.property.label;
    res.problems.push_back(std::move(p));
  }
  return res;
}

// Instantiates a catalog pattern over bound placeholder expressions.
// P1: (alpha -> beta), P2: beta, P3: NOT(alpha AND beta), each checked at
// the end-of-cycle location. The produced property expression contains the
// bound sub-expression nodes themselves.
inline ProblemsResult instantiate_pattern(
    const std::string& pattern_id,
    const std::map<std::string, ExprPtr>& bindings, const CfaNetwork& net,
    const ProblemConfig& cfg = {}) {
  ProblemsResult res;
  auto fail = [&](std::string m) {
    res.diagnostics.push_back(Diagnostic{Severity::Error, std::move(m), Span{}});
    return res;
  };

  const RequirementPattern* pat = nullptr;
  for (const RequirementPattern& p : pattern_catalog())
    if (p.id == pattern_id) pat = &p;
  if (!pat) return fail("unknown requirement pattern '" + pattern_id + "'");

  for (const std::string& ph : pat->placeholders) {
    auto it = bindings.find(ph);
    if (it == bindings.end() || !it->second)
      return fail("pattern " + pattern_id + " placeholder '" + ph +
                  "' is not bound");
    if (it->second->type != Scalar::Bool)
      return fail("pattern " + pattern_id + " placeholder '" + ph +
                  "' must be BOOL");
  }

  ExprPtr expr;
  if (pattern_id == "P1") {
    expr = make_or(make_not(bindings.at("alpha")), bindings.at("beta"));
  } else if (pattern_id == "P2") {
    expr = bindings.at("beta");
  } else {
    expr = make_not(make_and(bindings.at("alpha"), bindings.at("beta")));
  }

  VerificationProblem p;
  p.net = net;
  p.property.at = Property::At::EndOfCycle;
  p.property.expr = expr;
  p.property.label = pattern_id;
  p.job = cfg;
  p.provenance = "pattern " + pattern_id;
  res.problems.push_back(std::move(p));
  return res;
}

}  // namespace stverif
