#pragma once
// Iterative verification by function abstraction. Call sites of selected
// callees are replaced with nondeterministic assignments to their bound
// outputs, the abstract problem is checked, and any counterexample is
// validated against the fully concrete program; a spurious one sends the
// callee blamed by the first divergent variable back to concrete.
//
// Abstraction over-approximates: a Satisfied abstract verdict carries over
// to the concrete program, so the loop ends early whenever the property
// never depended on the abstracted bodies.
#include <chrono>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stverif/cex.hpp"
#include "stverif/cfa_build.hpp"
#include "stverif/engine.hpp"

namespace stverif {

struct IterationRecord {
  enum class Validation { NotNeeded, Feasible, Spurious };
  int iteration = 0;  // 1-based
  int abstracted_count = 0;
  VerdictKind verdict = VerdictKind::Unknown;
  Validation validation = Validation::NotNeeded;
  Symbol concretized;  // set when validation == Spurious
  double seconds = 0.0;
};

struct AbstractionState {
  std::set<Symbol> abstracted;
  std::vector<Symbol> concretized;  // in concretization order
  std::vector<IterationRecord> iterations;
};

namespace iter_detail {

// Variables a callee's outputs bind to at the entry automaton's call
// sites; these are the persistent names an abstraction can perturb.
inline std::set<Symbol> bound_outputs(const CfaNetwork& net, Symbol callee) {
  std::set<Symbol> out;
  for (const CallSite& cs : net.main.call_sites)
    if (cs.callee == callee)
      for (const auto& [formal, lv] : cs.out_binds) out.insert(lv.var);
  return out;
}

inline bool hosts_anchor(const Automaton& a, int anchor_id) {
  for (const Location& l : a.locations)
    if (l.role == LocRole::AssertionAnchor && l.anchor_id == anchor_id)
      return true;
  return false;
}

// Rewrites call transitions to named callees into nondeterministic output
// assignments. Input argument evaluation is dropped, which is sound
// because the expression language has no side effects.
inline void havoc_call_transitions(Automaton& a, const CfaNetwork& net,
                                   const std::set<Symbol>& names) {
  for (Transition& t : a.transitions) {
    if (t.call_index < 0) continue;
    const CallSite& cs = a.call_sites[static_cast<size_t>(t.call_index)];
    if (!names.count(cs.callee)) continue;
    int ci = net.callee_index(cs.callee);
    if (ci < 0) throw std::logic_error("call to unknown callee");

    std::vector<Assignment> assigns;
    for (const auto& [formal, lv] : cs.out_binds) {
      const Variable* fv = nullptr;
      for (const Variable& v : net.callee_vars[static_cast<size_t>(ci)])
        if (v.name == formal) fv = &v;
      if (!fv) throw std::logic_error("unresolved output parameter");
      Assignment as;
      as.var = lv.var;
      as.index = lv.index;
      as.value = Expr::nondet(fv->type.base, std::nullopt, cs.span);
      as.span = cs.span;
      assigns.push_back(std::move(as));
    }
    t.assigns = std::move(assigns);
    t.call_index = -1;
  }
}

}  // namespace iter_detail

// Replaces every call to a named callee with assignments drawing each
// bound output from its full type domain; remaining callees inline as
// usual. With no names this equals plain inlining.
inline VerificationProblem abstract_functions(const VerificationProblem& p,
                                              const std::set<Symbol>& names) {
  for (Symbol n : names)
    if (p.net.callee_index(n) < 0)
      throw std::invalid_argument("unknown callee '" + std::string(n.str()) +
                                  "'");
  CfaNetwork net = p.net;
  iter_detail::havoc_call_transitions(net.main, net, names);
  for (Automaton& c : net.callees)
    iter_detail::havoc_call_transitions(c, net, names);

  VerificationProblem out = p;
  out.net = inline_callees(net);
  return out;
}

// Abstraction refinement loop. Starts with every callee abstracted except
// ones hosting the property's own anchor, checks, validates refutations
// against the concrete program, and concretizes one callee per spurious
// result: the first one (declaration order) binding the first divergent
// variable, or the first abstracted one when no binder matches. With
// max_iters > 0 the loop gives up as Unknown once the cap is hit while
// callees remain abstracted.
inline std::pair<Verdict, AbstractionState> iterative_verify(
    const VerificationProblem& p, const EngineConfig& cfg = {},
    int max_iters = 0) {
  AbstractionState st;
  for (const Automaton& c : p.net.callees) {
    if (p.property.at == Property::At::Anchor &&
        iter_detail::hosts_anchor(c, p.property.anchor_id))
      st.concretized.push_back(c.name);
    else
      st.abstracted.insert(c.name);
  }

  VerificationProblem concrete = p;
  concrete.net = inline_callees(p.net);

  while (true) {
    IterationRecord rec;
    rec.iteration = static_cast<int>(st.iterations.size()) + 1;
    rec.abstracted_count = static_cast<int>(st.abstracted.size());

    auto t0 = std::chrono::steady_clock::now();
    VerificationProblem ap = abstract_functions(p, st.abstracted);
    Verdict v = check(ap, cfg);
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    rec.verdict = v.kind;

    bool refuted = (v.kind == VerdictKind::Violated ||
                    v.kind == VerdictKind::Fault) &&
                   v.trace.has_value();
    if (!refuted || st.abstracted.empty()) {
      // Satisfied is sound by over-approximation; BoundReached and Unknown
      // propagate; with nothing abstracted this is the concrete verdict
      st.iterations.push_back(rec);
      return {std::move(v), std::move(st)};
    }

    ValidationResult vr = validate(concrete, *v.trace);
    if (vr.feasible) {
      rec.validation = IterationRecord::Validation::Feasible;
      st.iterations.push_back(rec);
      return {std::move(v), std::move(st)};
    }

    Symbol pick;
    std::string base =
        vr.divergent_variable.substr(0, vr.divergent_variable.find('['));
    if (!base.empty()) {
      Symbol bv = Symbol::intern(base);
      for (const Automaton& c : p.net.callees) {
        if (!st.abstracted.count(c.name)) continue;
        if (iter_detail::bound_outputs(p.net, c.name).count(bv)) {
          pick = c.name;
          break;
        }
      }
    }
    if (!pick.valid())
      for (const Automaton& c : p.net.callees)
        if (st.abstracted.count(c.name)) {
          pick = c.name;
          break;
        }

    rec.validation = IterationRecord::Validation::Spurious;
    rec.concretized = pick;
    st.abstracted.erase(pick);
    st.concretized.push_back(pick);
    st.iterations.push_back(rec);

    if (max_iters > 0 &&
        static_cast<int>(st.iterations.size()) >= max_iters &&
        !st.abstracted.empty()) {
      Verdict u;
      u.kind = VerdictKind::Unknown;
      u.note = "iteration limit reached with callees still abstracted";
      return {std::move(u), std::move(st)};
    }
  }
}

}  // namespace stverif
