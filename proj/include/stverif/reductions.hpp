#pragma once
// Verdict-preserving problem shrinking, run after inlining and before the
// checker: constant folding, unreachable-location removal, cone of
// influence, and an input value-set abstraction.
//
// Pass order in the pipeline is fold, unreachable, cone, value-set:
// folding exposes dead branches, cleanup helps the cone, and the
// abstraction wants to see the final comparison set.
#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "stverif/eval.hpp"
#include "stverif/requirements.hpp"

namespace stverif {

struct ReductionReport {
  std::string pass;
  int variables_removed = 0;
  int transitions_removed = 0;
  int assignments_removed = 0;
  int locations_removed = 0;
  int constants_folded = 0;
  int domains_restricted = 0;
  bool refused = false;  // value-set only: variable flows into arithmetic
  int before_locations = 0, after_locations = 0;
  int before_transitions = 0, after_transitions = 0;
  int before_variables = 0, after_variables = 0;
};

namespace detail {

inline void stamp_before(ReductionReport& r, const VerificationProblem& p) {
  r.before_locations = static_cast<int>(p.net.main.locations.size());
  r.before_transitions = static_cast<int>(p.net.main.transitions.size());
  r.before_variables = static_cast<int>(p.net.variables.size());
}

inline void stamp_after(ReductionReport& r, const VerificationProblem& p) {
  r.after_locations = static_cast<int>(p.net.main.locations.size());
  r.after_transitions = static_cast<int>(p.net.main.transitions.size());
  r.after_variables = static_cast<int>(p.net.variables.size());
}

// True when evaluating e can never raise a runtime fault; folding may only
// erase subexpressions that hold this.
inline bool fault_free(const ExprPtr& e) {
  if (!e) return true;
  switch (e->kind) {
    case Expr::Kind::Literal:
    case Expr::Kind::VarRef:
    case Expr::Kind::Nondet:
      return true;
    case Expr::Kind::ArrayRead:
      return false;  // index may be out of range
    case Expr::Kind::Unary:
      return fault_free(e->a);
    case Expr::Kind::Binary:
      if (e->bin == BinOp::Div || e->bin == BinOp::Mod) {
        // safe only when the divisor is a nonzero literal
        if (!(e->b && e->b->kind == Expr::Kind::Literal && e->b->value != 0))
          return false;
      }
      return fault_free(e->a) && fault_free(e->b);
  }
  return false;
}

class Folder {
 public:
  explicit Folder(const CfaNetwork& net) {
    for (const Variable& v : net.variables)
      if (v.kind == VarKind::Constant && v.init && !v.type.array)
        const_vars_.emplace(v.name, std::pair{v.type.base, *v.init});
  }

  int folded() const { return folded_; }

  ExprPtr fold(const ExprPtr& e) {
    if (!e) return e;
    switch (e->kind) {
      case Expr::Kind::Literal:
      case Expr::Kind::Nondet:
        return e;
      case Expr::Kind::VarRef: {
        auto it = const_vars_.find(e->var);
        if (it == const_vars_.end()) return e;
        ++folded_;
        return Expr::literal(it->second.first, it->second.second, e->span);
      }
      case Expr::Kind::ArrayRead: {
        ExprPtr idx = fold(e->index);
        if (idx == e->index) return e;
        return Expr::array_read(e->var, idx, e->type, e->span);
      }
      case Expr::Kind::Unary: {
        ExprPtr a = fold(e->a);
        if (a->kind == Expr::Kind::Literal) {
          ++folded_;
          int32_t v = e->un == UnOp::Not
                          ? (a->value ? 0 : 1)
                          : wrap_to(e->type, -static_cast<int64_t>(a->value));
          return Expr::literal(e->type, v, e->span);
        }
        if (a == e->a) return e;
        return Expr::unary(e->un, a, e->type, e->span);
      }
      case Expr::Kind::Binary:
        return fold_binary(e);
    }
    return e;
  }

 private:
  ExprPtr fold_binary(const ExprPtr& e) {
    ExprPtr a = fold(e->a);
    ExprPtr b = fold(e->b);

    // short-circuit identities; erasing the right side needs fault freedom
    if (e->bin == BinOp::And) {
      if (a->kind == Expr::Kind::Literal) {
        ++folded_;
        if (a->is_false()) return Expr::literal(Scalar::Bool, 0, e->span);
        return b;
      }
      if (b->kind == Expr::Kind::Literal && b->is_true()) {
        ++folded_;
        return a;
      }
      if (b->kind == Expr::Kind::Literal && b->is_false() && fault_free(a)) {
        ++folded_;
        return Expr::literal(Scalar::Bool, 0, e->span);
      }
    }
    if (e->bin == BinOp::Or) {
      if (a->kind == Expr::Kind::Literal) {
        ++folded_;
        if (a->is_true()) return Expr::literal(Scalar::Bool, 1, e->span);
        return b;
      }
      if (b->kind == Expr::Kind::Literal && b->is_false()) {
        ++folded_;
        return a;
      }
      if (b->kind == Expr::Kind::Literal && b->is_true() && fault_free(a)) {
        ++folded_;
        return Expr::literal(Scalar::Bool, 1, e->span);
      }
    }

    if (a->kind == Expr::Kind::Literal && b->kind == Expr::Kind::Literal) {
      int64_t x = a->value, y = b->value;
      bool ok = true;
      int32_t v = 0;
      switch (e->bin) {
        case BinOp::Xor: v = (x != 0) != (y != 0); break;
        case BinOp::Eq: v = x == y; break;
        case BinOp::Ne: v = x != y; break;
        case BinOp::Lt: v = x < y; break;
        case BinOp::Le: v = x <= y; break;
        case BinOp::Gt: v = x > y; break;
        case BinOp::Ge: v = x >= y; break;
        case BinOp::Add: v = wrap_to(e->type, x + y); break;
        case BinOp::Sub: v = wrap_to(e->type, x - y); break;
        case BinOp::Mul: v = wrap_to(e->type, x * y); break;
        case BinOp::Div:
        case BinOp::Mod:
          // division by a zero literal must stay a runtime fault
          if (y == 0) {
            ok = false;
          } else {
            v = wrap_to(e->type, e->bin == BinOp::Div ? x / y : x % y);
          }
          break;
        default:
          ok = false;
          break;
      }
      if (ok) {
        ++folded_;
        return Expr::literal(e->type, v, e->span);
      }
    }

    if (a == e->a && b == e->b) return e;
    return Expr::binary(e->bin, a, b, e->type, e->span);
  }

  std::unordered_map<Symbol, std::pair<Scalar, int32_t>, SymbolHash>
      const_vars_;
  int folded_ = 0;
};

inline void collect_vars(const ExprPtr& e, std::set<Symbol>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::VarRef || e->kind == Expr::Kind::ArrayRead)
    out.insert(e->var);
  collect_vars(e->index, out);
  collect_vars(e->a, out);
  collect_vars(e->b, out);
}

// True when executing the assignment may raise a runtime fault even though
// its target is dead: faultable right-hand side, or an array write whose
// index is not a literal within bounds.
inline bool assign_faultable(const Assignment& as, const CfaNetwork& net) {
  if (!fault_free(as.value)) return true;
  if (!as.index) return false;
  if (!fault_free(as.index)) return true;
  if (as.index->kind == Expr::Kind::Literal) {
    const Variable* v = net.find_variable(as.var);
    if (v && v->type.array && as.index->value >= v->type.lo &&
        as.index->value <= v->type.hi)
      return false;
  }
  return true;
}

}  // namespace detail

// Folds constants in guards, assignments, and assertion expressions.
// Guards that fold to FALSE delete their transition; TRUE guards are
// erased. Faultable subexpressions are never erased.
inline ReductionReport constant_fold(VerificationProblem& p) {
  ReductionReport rep;
  rep.pass = "fold";
  detail::stamp_before(rep, p);

  detail::Folder folder(p.net);
  Automaton& m = p.net.main;
  std::vector<Transition> kept;
  kept.reserve(m.transitions.size());
  for (Transition t : m.transitions) {
    t.guard = folder.fold(t.guard);
    if (t.guard && t.guard->kind == Expr::Kind::Literal) {
      if (t.guard->is_false()) {
        ++rep.transitions_removed;
        continue;
      }
      t.guard = nullptr;  // TRUE
    }
    for (Assignment& as : t.assigns) {
      as.value = folder.fold(as.value);
      as.index = folder.fold(as.index);
    }
    kept.push_back(std::move(t));
  }
  m.transitions = std::move(kept);
  for (Location& l : m.locations)
    if (l.assertion) l.assertion = folder.fold(l.assertion);
  p.property.expr = folder.fold(p.property.expr);

  rep.constants_folded = folder.folded();
  detail::stamp_after(rep, p);
  return rep;
}

// Removes locations unreachable from the initial location and remaps ids.
inline ReductionReport eliminate_unreachable(VerificationProblem& p) {
  ReductionReport rep;
  rep.pass = "unreach";
  detail::stamp_before(rep, p);

  Automaton& m = p.net.main;
  std::vector<char> seen(m.locations.size(), 0);
  std::vector<int> work{m.initial};
  seen[static_cast<size_t>(m.initial)] = 1;
  while (!work.empty()) {
    int loc = work.back();
    work.pop_back();
    for (const Transition& t : m.transitions) {
      if (t.source != loc) continue;
      if (!seen[static_cast<size_t>(t.target)]) {
        seen[static_cast<size_t>(t.target)] = 1;
        work.push_back(t.target);
      }
    }
  }

  std::vector<int> remap(m.locations.size(), -1);
  std::vector<Location> locs;
  for (const Location& l : m.locations) {
    if (!seen[static_cast<size_t>(l.id)]) {
      ++rep.locations_removed;
      continue;
    }
    Location nl = l;
    nl.id = static_cast<int>(locs.size());
    remap[static_cast<size_t>(l.id)] = nl.id;
    locs.push_back(std::move(nl));
  }
  std::vector<Transition> trans;
  for (Transition t : m.transitions) {
    if (!seen[static_cast<size_t>(t.source)]) {
      ++rep.transitions_removed;
      continue;
    }
    t.source = remap[static_cast<size_t>(t.source)];
    t.target = remap[static_cast<size_t>(t.target)];
    trans.push_back(std::move(t));
  }
  m.locations = std::move(locs);
  m.transitions = std::move(trans);
  auto fix = [&](int& id) {
    if (id >= 0) id = remap[static_cast<size_t>(id)];
  };
  fix(m.initial);
  fix(m.cycle_start);
  fix(m.end_of_cycle);
  fix(m.exit);

  detail::stamp_after(rep, p);
  return rep;
}

// Backward dependency closure of the property over assignments; guard
// variables are retained whole, which soundly covers control dependence.
// Variables and assignments outside the closure are removed. Anchor
// locations of other assertions are demoted to plain locations, since this
// problem never evaluates them.
inline ReductionReport cone_of_influence(VerificationProblem& p) {
  ReductionReport rep;
  rep.pass = "coi";
  detail::stamp_before(rep, p);

  Automaton& m = p.net.main;

  for (Location& l : m.locations) {
    if (l.role != LocRole::AssertionAnchor) continue;
    if (p.property.at == Property::At::Anchor &&
        l.anchor_id == p.property.anchor_id)
      continue;
    l.role = LocRole::Plain;
    l.assertion = nullptr;
    l.anchor_id = -1;
    l.anchor_name.clear();
  }

  std::set<Symbol> kept;
  if (p.property.at == Property::At::EndOfCycle) {
    detail::collect_vars(p.property.expr, kept);
  } else {
    // seed from the anchor locations' expressions: inlining may have
    // renamed the variables the directive text mentions
    for (const Location& l : m.locations)
      if (l.role == LocRole::AssertionAnchor)
        detail::collect_vars(l.assertion, kept);
  }
  for (const Transition& t : m.transitions)
    detail::collect_vars(t.guard, kept);

  // assignments that can fault must stay, with everything they read, so
  // that Fault verdicts survive the reduction
  for (const Transition& t : m.transitions) {
    for (const Assignment& as : t.assigns) {
      if (!detail::assign_faultable(as, p.net)) continue;
      kept.insert(as.var);
      detail::collect_vars(as.value, kept);
      detail::collect_vars(as.index, kept);
    }
  }

  // transitive data dependence through assignments into kept variables
  bool grew = true;
  while (grew) {
    grew = false;
    for (const Transition& t : m.transitions) {
      for (const Assignment& as : t.assigns) {
        if (!kept.count(as.var)) continue;
        std::set<Symbol> rhs;
        detail::collect_vars(as.value, rhs);
        detail::collect_vars(as.index, rhs);
        for (Symbol s : rhs) grew = kept.insert(s).second || grew;
      }
    }
  }

  for (Transition& t : m.transitions) {
    std::vector<Assignment> keep;
    keep.reserve(t.assigns.size());
    for (Assignment& as : t.assigns) {
      if (kept.count(as.var))
        keep.push_back(std::move(as));
      else
        ++rep.assignments_removed;
    }
    t.assigns = std::move(keep);
  }

  std::vector<Variable> vars;
  for (Variable& v : p.net.variables) {
    if (kept.count(v.name))
      vars.push_back(std::move(v));
    else
      ++rep.variables_removed;
  }
  p.net.variables = std::move(vars);

  detail::stamp_after(rep, p);
  return rep;
}

namespace detail {

// Occurrence scan for the value-set abstraction: records literals compared
// against the variable; any other appearance of the variable poisons the
// restriction.
inline void scan_occurrences(const ExprPtr& e, Symbol var,
                             std::set<int64_t>& bounds, bool& poisoned) {
  if (!e || poisoned) return;
  if (e->kind == Expr::Kind::Binary && is_comparison(e->bin)) {
    const ExprPtr& a = e->a;
    const ExprPtr& b = e->b;
    bool a_is_var = a->kind == Expr::Kind::VarRef && a->var == var;
    bool b_is_var = b->kind == Expr::Kind::VarRef && b->var == var;
    if (a_is_var && b->kind == Expr::Kind::Literal) {
      bounds.insert(b->value);
      return;
    }
    if (b_is_var && a->kind == Expr::Kind::Literal) {
      bounds.insert(a->value);
      return;
    }
    // comparison against a non-literal still reads the raw value
    if (a_is_var || b_is_var) {
      poisoned = true;
      return;
    }
    scan_occurrences(a, var, bounds, poisoned);
    scan_occurrences(b, var, bounds, poisoned);
    return;
  }
  if (e->kind == Expr::Kind::VarRef && e->var == var) {
    poisoned = true;  // arithmetic, copy, or index use
    return;
  }
  scan_occurrences(e->index, var, bounds, poisoned);
  scan_occurrences(e->a, var, bounds, poisoned);
  scan_occurrences(e->b, var, bounds, poisoned);
}

}  // namespace detail

// Restricts an input variable's havoc domain to boundary representatives
// of the constants it is compared against: {c-1, c, c+1} per constant,
// clamped to the type range, plus the type minimum and maximum. Refuses
// (identity plus report flag) when the variable is read anywhere outside a
// comparison with a literal, because the restriction would then be
// unsound.
inline ReductionReport value_set_abstraction(VerificationProblem& p,
                                             Symbol var) {
  ReductionReport rep;
  rep.pass = "valueset";
  detail::stamp_before(rep, p);
  detail::stamp_after(rep, p);

  Variable* v = nullptr;
  for (Variable& cand : p.net.variables)
    if (cand.name == var) v = &cand;
  if (!v || v->kind != VarKind::Input || v->type.base == Scalar::Bool ||
      v->type.array) {
    rep.refused = true;
    return rep;
  }

  // an explicit value list is already a restriction artifact; repeating
  // the pass is the identity
  if (v->domain.values) return rep;

  std::set<int64_t> bounds;
  bool poisoned = false;
  const Automaton& m = p.net.main;
  for (const Transition& t : m.transitions) {
    detail::scan_occurrences(t.guard, var, bounds, poisoned);
    for (const Assignment& as : t.assigns) {
      detail::scan_occurrences(as.value, var, bounds, poisoned);
      detail::scan_occurrences(as.index, var, bounds, poisoned);
    }
  }
  for (const Location& l : m.locations)
    detail::scan_occurrences(l.assertion, var, bounds, poisoned);
  detail::scan_occurrences(p.property.expr, var, bounds, poisoned);

  if (poisoned) {
    rep.refused = true;
    return rep;
  }

  // clamp to the variable's current havoc range so representatives are
  // always values the unreduced problem could pick
  int64_t lo = v->domain.lo;
  int64_t hi = v->domain.hi;
  std::set<int64_t> values{lo, hi};
  for (int64_t c : bounds)
    for (int64_t cand : {c - 1, c, c + 1})
      if (cand >= lo && cand <= hi) values.insert(cand);

  Domain dom;
  dom.values = std::vector<int32_t>(values.begin(), values.end());
  dom.lo = static_cast<int32_t>(*values.begin());
  dom.hi = static_cast<int32_t>(*values.rbegin());
  if (dom.size() < v->domain.size()) {
    v->domain = std::move(dom);
    rep.domains_restricted = 1;
  }
  return rep;
}

// Full pipeline honoring the problem's configuration switches. The
// value-set pass runs over every numeric input variable individually.
inline std::vector<ReductionReport> reduce_problem(VerificationProblem& p) {
  std::vector<ReductionReport> reports;
  if (p.job.reduce_fold) reports.push_back(constant_fold(p));
  if (p.job.reduce_unreach) reports.push_back(eliminate_unreachable(p));
  if (p.job.reduce_coi) reports.push_back(cone_of_influence(p));
  if (p.job.reduce_valueset) {
    std::vector<Symbol> inputs;
    for (const Variable& v : p.net.variables)
      if (v.kind == VarKind::Input && v.type.base != Scalar::Bool &&
          !v.type.array)
        inputs.push_back(v.name);
    for (Symbol name : inputs)
      reports.push_back(value_set_abstraction(p, name));
  }
  return reports;
}

}  // namespace stverif
