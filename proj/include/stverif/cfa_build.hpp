#pragma once
// Lowers a TypedAst entry point to a CfaNetwork with scan-cycle structure,
// and inlines call sites.
//
// Shape of the main automaton:
//   initial --TRUE--> cycle-start --havoc--> body ... --TRUE--> end-of-cycle
//   end-of-cycle --TRUE--> cycle-start          (infinite scan loop)
// The havoc transition assigns every input a nondeterministic value and
// resets VAR_TEMP variables to their defaults. Callee units lower to
// entry/exit automata without cycle structure; RETURN jumps to the exit.
//
// Branch transitions are priority-ordered per source location (first match
// wins); the final default guard is the explicit negation of the others, so
// outgoing guards always cover every valuation.
#include <string>
#include <unordered_map>
#include <vector>

#include "stverif/cfa.hpp"
#include "stverif/eval.hpp"

namespace stverif {

struct BuildResult {
  std::optional<CfaNetwork> net;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return net.has_value(); }
};

namespace detail {

// Rewrites variable symbols in an expression; used when inlining renames
// callee variables. Returns the original node when nothing changes.
inline ExprPtr subst_expr(
    const ExprPtr& e,
    const std::unordered_map<Symbol, Symbol, SymbolHash>& map) {
  if (!e) return e;
  switch (e->kind) {
    case Expr::Kind::Literal:
    case Expr::Kind::Nondet:
      return e;
    case Expr::Kind::VarRef: {
      auto it = map.find(e->var);
      if (it == map.end()) return e;
      return Expr::var_ref(it->second, e->type, e->span);
    }
    case Expr::Kind::ArrayRead: {
      ExprPtr idx = subst_expr(e->index, map);
      auto it = map.find(e->var);
      if (it == map.end() && idx == e->index) return e;
      return Expr::array_read(it == map.end() ? e->var : it->second, idx,
                              e->type, e->span);
    }
    case Expr::Kind::Unary: {
      ExprPtr a = subst_expr(e->a, map);
      if (a == e->a) return e;
      return Expr::unary(e->un, a, e->type, e->span);
    }
    case Expr::Kind::Binary: {
      ExprPtr a = subst_expr(e->a, map);
      ExprPtr b = subst_expr(e->b, map);
      if (a == e->a && b == e->b) return e;
      return Expr::binary(e->bin, a, b, e->type, e->span);
    }
  }
  return e;
}

class UnitLowering {
 public:
  UnitLowering(const Unit& unit,
               const std::unordered_map<int, const AssertionDirective*>& dirs,
               std::vector<Diagnostic>& diags)
      : unit_(unit), dirs_(dirs), diags_(diags) {}

  // Main (entry) automaton with scan-cycle structure.
  Automaton lower_main() {
    Automaton a;
    a.name = unit_.name;
    a.initial = a.add_location(LocRole::Initial);
    a.cycle_start = a.add_location(LocRole::CycleStart);
    a.end_of_cycle = a.add_location(LocRole::EndOfCycle);
    add_trans(a, a.initial, a.cycle_start, nullptr);

    int body_entry = a.add_location(LocRole::Plain);
    Transition havoc;
    havoc.source = a.cycle_start;
    havoc.target = body_entry;
    havoc.havoc = true;
    for (const VarDecl& v : unit_.vars) {
      if (v.kind == VarKind::Input) {
        Assignment as;
        as.var = v.name;
        as.value = Expr::nondet(v.type.base, std::nullopt, v.span);
        as.span = v.span;
        havoc.assigns.push_back(std::move(as));
      } else if (v.kind == VarKind::Temp) {
        append_reset_assigns(v, havoc.assigns);
      }
    }
    a.transitions.push_back(std::move(havoc));

    return_target_ = a.end_of_cycle;
    cur_ = body_entry;
    lower_block(a, unit_.body);
    add_trans(a, cur_, a.end_of_cycle, nullptr);
    add_trans(a, a.end_of_cycle, a.cycle_start, nullptr);
    return a;
  }

  // Callee automaton: entry/exit, no havoc, RETURN jumps to exit.
  Automaton lower_callee() {
    Automaton a;
    a.name = unit_.name;
    a.initial = a.add_location(LocRole::Plain);
    a.exit = a.add_location(LocRole::Plain);
    return_target_ = a.exit;
    cur_ = a.initial;
    lower_block(a, unit_.body);
    add_trans(a, cur_, a.exit, nullptr);
    return a;
  }

 private:
  void error(Span sp, std::string msg) {
    diags_.push_back(Diagnostic{Severity::Error, std::move(msg), sp});
  }

  static void append_reset_assigns(const VarDecl& v,
                                   std::vector<Assignment>& out) {
    int32_t init = v.init.value_or(0);
    if (!v.type.array) {
      Assignment as;
      as.var = v.name;
      as.value = Expr::literal(v.type.base, init, v.span);
      as.span = v.span;
      out.push_back(std::move(as));
      return;
    }
    for (int64_t i = v.type.lo; i <= v.type.hi; ++i) {
      Assignment as;
      as.var = v.name;
      as.index = Expr::literal(Scalar::Int, static_cast<int32_t>(i), v.span);
      as.value = Expr::literal(v.type.base, init, v.span);
      as.span = v.span;
      out.push_back(std::move(as));
    }
  }

  int add_trans(Automaton& a, int src, int dst, ExprPtr guard,
                std::vector<Assignment> assigns = {}) {
    Transition t;
    t.source = src;
    t.target = dst;
    t.guard = std::move(guard);
    t.assigns = std::move(assigns);
    a.transitions.push_back(std::move(t));
    return static_cast<int>(a.transitions.size() - 1);
  }

  void lower_block(Automaton& a, const std::vector<Stmt>& body) {
    for (const Stmt& s : body) lower_stmt(a, s);
  }

  void lower_stmt(Automaton& a, const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        int next = a.add_location(LocRole::Plain);
        Assignment as;
        as.var = s.lhs.var;
        as.index = s.lhs.index;
        as.value = s.rhs;
        as.span = s.span;
        add_trans(a, cur_, next, nullptr, {std::move(as)});
        cur_ = next;
        break;
      }
      case Stmt::Kind::AssertComment:
        place_anchor(a, s);
        break;
      case Stmt::Kind::If:
        lower_if(a, s);
        break;
      case Stmt::Kind::Case:
        lower_case(a, s);
        break;
      case Stmt::Kind::For:
        lower_for(a, s);
        break;
      case Stmt::Kind::While:
        lower_while(a, s);
        break;
      case Stmt::Kind::Repeat:
        lower_repeat(a, s);
        break;
      case Stmt::Kind::Call: {
        int next = a.add_location(LocRole::Plain);
        CallSite cs;
        cs.callee = s.callee;
        cs.in_binds = s.in_binds;
        cs.out_binds = s.out_binds;
        cs.span = s.span;
        a.call_sites.push_back(std::move(cs));
        int ti = add_trans(a, cur_, next, nullptr);
        a.transitions[static_cast<size_t>(ti)].call_index =
            static_cast<int>(a.call_sites.size() - 1);
        cur_ = next;
        break;
      }
      case Stmt::Kind::Return:
        add_trans(a, cur_, return_target_, nullptr);
        // continue lowering into an unreachable location so later
        // statements still exist structurally
        cur_ = a.add_location(LocRole::Plain);
        break;
      case Stmt::Kind::Exit:
        if (loop_exits_.empty()) {
          error(s.span, "EXIT outside of a loop");
          break;
        }
        add_trans(a, cur_, loop_exits_.back(), nullptr);
        cur_ = a.add_location(LocRole::Plain);
        break;
    }
  }

  void place_anchor(Automaton& a, const Stmt& s) {
    auto it = dirs_.find(s.anchor_id);
    if (it == dirs_.end() || !it->second->expr) {
      error(s.span, "assertion directive missing for anchor");
      return;
    }
    Location& here = a.loc(cur_);
    if (here.role == LocRole::Plain) {
      here.role = LocRole::AssertionAnchor;
      here.assertion = it->second->expr;
      here.anchor_id = s.anchor_id;
      here.anchor_name = it->second->name;
      return;
    }
    // current location already carries a role: chain a new one
    int next = a.add_location(LocRole::AssertionAnchor);
    a.loc(next).assertion = it->second->expr;
    a.loc(next).anchor_id = s.anchor_id;
    a.loc(next).anchor_name = it->second->name;
    add_trans(a, cur_, next, nullptr);
    cur_ = next;
  }

  void lower_if(Automaton& a, const Stmt& s) {
    int branch = cur_;
    int join = a.add_location(LocRole::Plain);
    ExprPtr all_neg;  // conjunction of negated arm conditions
    for (const IfArm& arm : s.arms) {
      int entry = a.add_location(LocRole::Plain);
      add_trans(a, branch, entry, arm.cond);
      cur_ = entry;
      lower_block(a, arm.body);
      add_trans(a, cur_, join, nullptr);
      ExprPtr neg = make_not(arm.cond);
      all_neg = all_neg ? make_and(all_neg, neg) : neg;
    }
    if (s.else_body.empty()) {
      add_trans(a, branch, join, all_neg);
    } else {
      int entry = a.add_location(LocRole::Plain);
      add_trans(a, branch, entry, all_neg);
      cur_ = entry;
      lower_block(a, s.else_body);
      add_trans(a, cur_, join, nullptr);
    }
    cur_ = join;
  }

  // Range guard for one CASE branch, clamped to the selector's width;
  // fully out-of-range labels contribute nothing.
  ExprPtr branch_guard(const ExprPtr& sel, const CaseBranch& br) {
    ExprPtr g;
    int64_t tmin = scalar_min(sel->type), tmax = scalar_max(sel->type);
    for (auto [lo, hi] : br.ranges) {
      int64_t clo = std::max<int64_t>(lo, tmin);
      int64_t chi = std::min<int64_t>(hi, tmax);
      if (clo > chi) continue;
      ExprPtr piece;
      if (clo == chi) {
        piece = Expr::binary(
            BinOp::Eq, sel,
            Expr::literal(sel->type, static_cast<int32_t>(clo), br.span),
            Scalar::Bool, br.span);
      } else {
        ExprPtr ge = Expr::binary(
            BinOp::Ge, sel,
            Expr::literal(sel->type, static_cast<int32_t>(clo), br.span),
            Scalar::Bool, br.span);
        ExprPtr le = Expr::binary(
            BinOp::Le, sel,
            Expr::literal(sel->type, static_cast<int32_t>(chi), br.span),
            Scalar::Bool, br.span);
        piece = make_and(ge, le);
      }
      g = g ? make_or(g, piece) : piece;
    }
    return g;  // null when every range misses the type entirely
  }

  void lower_case(Automaton& a, const Stmt& s) {
    int branch = cur_;
    int join = a.add_location(LocRole::Plain);
    ExprPtr any;
    for (const CaseBranch& br : s.branches) {
      ExprPtr g = branch_guard(s.selector, br);
      if (!g) continue;
      int entry = a.add_location(LocRole::Plain);
      add_trans(a, branch, entry, g);
      cur_ = entry;
      lower_block(a, br.body);
      add_trans(a, cur_, join, nullptr);
      any = any ? make_or(any, g) : g;
    }
    ExprPtr dflt = any ? make_not(any) : nullptr;
    if (s.else_body.empty()) {
      add_trans(a, branch, join, dflt);
    } else {
      int entry = a.add_location(LocRole::Plain);
      add_trans(a, branch, entry, dflt);
      cur_ = entry;
      lower_block(a, s.else_body);
      add_trans(a, cur_, join, nullptr);
    }
    cur_ = join;
  }

  void lower_for(Automaton& a, const Stmt& s) {
    // init: v := from; limit evaluated once into a synthetic temp unless
    // the bound is already a literal or plain variable
    const int32_t step = s.by;
    Scalar vty = Scalar::Int;
    if (const VarDecl* d = unit_.find_var(s.for_var)) vty = d->type.base;

    ExprPtr limit = s.to;
    std::vector<Assignment> init;
    Assignment iv;
    iv.var = s.for_var;
    iv.value = s.from;
    iv.span = s.span;
    init.push_back(std::move(iv));
    if (s.to->kind != Expr::Kind::Literal && s.to->kind != Expr::Kind::VarRef) {
      Symbol lim = Symbol::intern(std::string(s.for_var.str()) + "#limit" +
                                  std::to_string(synth_counter_++));
      synthetic_temps_.push_back(
          Variable{lim, scalar_type(s.to->type), VarKind::Temp, std::nullopt,
                   full_domain(s.to->type), s.span});
      Assignment la;
      la.var = lim;
      la.value = s.to;
      la.span = s.span;
      init.push_back(std::move(la));
      limit = Expr::var_ref(lim, s.to->type, s.span);
    }

    int head = a.add_location(LocRole::Plain);
    add_trans(a, cur_, head, nullptr, std::move(init));

    ExprPtr vref = Expr::var_ref(s.for_var, vty, s.span);
    ExprPtr cont = Expr::binary(step > 0 ? BinOp::Le : BinOp::Ge, vref, limit,
                                Scalar::Bool, s.span);
    int body_entry = a.add_location(LocRole::Plain);
    int exit = a.add_location(LocRole::Plain);
    add_trans(a, head, body_entry, cont);
    add_trans(a, head, exit, make_not(cont));

    loop_exits_.push_back(exit);
    cur_ = body_entry;
    lower_block(a, s.body);
    loop_exits_.pop_back();

    Assignment inc;
    inc.var = s.for_var;
    inc.value = Expr::binary(BinOp::Add, vref,
                             Expr::literal(vty, step, s.span), vty, s.span);
    inc.span = s.span;
    add_trans(a, cur_, head, nullptr, {std::move(inc)});
    cur_ = exit;
  }

  void lower_while(Automaton& a, const Stmt& s) {
    int head = a.add_location(LocRole::Plain);
    add_trans(a, cur_, head, nullptr);
    int body_entry = a.add_location(LocRole::Plain);
    int exit = a.add_location(LocRole::Plain);
    add_trans(a, head, body_entry, s.cond);
    add_trans(a, head, exit, make_not(s.cond));
    loop_exits_.push_back(exit);
    cur_ = body_entry;
    lower_block(a, s.body);
    loop_exits_.pop_back();
    add_trans(a, cur_, head, nullptr);
    cur_ = exit;
  }

  void lower_repeat(Automaton& a, const Stmt& s) {
    int body_entry = a.add_location(LocRole::Plain);
    add_trans(a, cur_, body_entry, nullptr);
    int exit = a.add_location(LocRole::Plain);
    loop_exits_.push_back(exit);
    cur_ = body_entry;
    lower_block(a, s.body);
    loop_exits_.pop_back();
    int tail = a.add_location(LocRole::Plain);
    add_trans(a, cur_, tail, nullptr);
    add_trans(a, tail, exit, s.cond);
    add_trans(a, tail, body_entry, make_not(s.cond));
    cur_ = exit;
  }

 public:
  std::vector<Variable> synthetic_temps_;

 private:
  const Unit& unit_;
  const std::unordered_map<int, const AssertionDirective*>& dirs_;
  std::vector<Diagnostic>& diags_;
  std::vector<int> loop_exits_;
  int cur_ = -1;
  int return_target_ = -1;
  int synth_counter_ = 0;
};

// Collects callee names reachable from a unit's body.
inline void collect_callees(const std::vector<Stmt>& body,
                            std::vector<Symbol>& out) {
  for (const Stmt& s : body) {
    switch (s.kind) {
      case Stmt::Kind::Call: {
        bool seen = false;
        for (Symbol c : out) seen = seen || c == s.callee;
        if (!seen) out.push_back(s.callee);
        break;
      }
      case Stmt::Kind::If:
        for (const auto& arm : s.arms) collect_callees(arm.body, out);
        collect_callees(s.else_body, out);
        break;
      case Stmt::Kind::Case:
        for (const auto& br : s.branches) collect_callees(br.body, out);
        collect_callees(s.else_body, out);
        break;
      case Stmt::Kind::For:
      case Stmt::Kind::While:
      case Stmt::Kind::Repeat:
        collect_callees(s.body, out);
        break;
      default:
        break;
    }
  }
}

}  // namespace detail

// Builds the CFA network for one entry unit. Callee units reachable through
// calls become entry/exit automata; recursion and array inputs are rejected.
inline BuildResult build_cfa(TypedAstPtr ast, std::string_view entry,
                             const std::vector<AssertionDirective>& assertions) {
  BuildResult res;
  auto err = [&](Span sp, std::string m) {
    res.diagnostics.push_back(Diagnostic{Severity::Error, std::move(m), sp});
  };

  const Unit* eu = ast->find_unit(Symbol::intern(entry));
  if (!eu) {
    err(Span{}, "entry point '" + std::string(entry) + "' not found");
    return res;
  }
  if (eu->kind == UnitKind::Function) {
    err(eu->span, "entry point must be a PROGRAM or FUNCTION_BLOCK");
    return res;
  }
  for (const VarDecl& v : eu->vars)
    if (v.kind == VarKind::Input && v.type.array)
      err(v.span, "array inputs are not supported on the entry unit");

  // transitive callee set, depth-first; recursion check via path marking
  std::vector<Symbol> order;
  std::vector<Symbol> path;
  bool cyclic = false;
  auto visit = [&](auto&& self, const Unit& u) -> void {
    for (Symbol p : path)
      if (p == u.name) {
        err(u.span, "recursive call cycle through '" +
                        std::string(u.name.str()) + "'");
        cyclic = true;
        return;
      }
    path.push_back(u.name);
    std::vector<Symbol> direct;
    detail::collect_callees(u.body, direct);
    for (Symbol c : direct) {
      const Unit* cu = ast->find_unit(c);
      if (!cu) continue;  // parser already reported it
      self(self, *cu);
      if (cyclic) return;
      bool seen = false;
      for (Symbol s : order) seen = seen || s == c;
      if (!seen) order.push_back(c);
    }
    path.pop_back();
  };
  visit(visit, *eu);
  if (cyclic || has_errors(res.diagnostics)) return res;

  std::unordered_map<int, const AssertionDirective*> dirs;
  for (const AssertionDirective& d : assertions) dirs[d.anchor_id] = &d;

  CfaNetwork net;
  net.ast = ast;
  net.entry_name = eu->name;
  for (const VarDecl& v : eu->vars) {
    Variable var{v.name, v.type, v.kind, v.init, full_domain(v.type.base),
                 v.span};
    net.variables.push_back(var);
  }

  detail::UnitLowering main_low(*eu, dirs, res.diagnostics);
  net.main = main_low.lower_main();
  for (const Variable& v : main_low.synthetic_temps_)
    net.variables.push_back(v);

  for (Symbol cname : order) {
    const Unit* cu = ast->find_unit(cname);
    detail::UnitLowering low(*cu, dirs, res.diagnostics);
    net.callees.push_back(low.lower_callee());
    std::vector<Variable> cvars;
    for (const VarDecl& v : cu->vars)
      cvars.push_back(Variable{v.name, v.type, v.kind, v.init,
                               full_domain(v.type.base), v.span});
    for (const Variable& v : low.synthetic_temps_) cvars.push_back(v);
    net.callee_vars.push_back(std::move(cvars));
  }

  if (has_errors(res.diagnostics)) return res;
  res.net = std::move(net);
  return res;
}

// --- inlining ----------------------------------------------------------------

namespace detail {

class Inliner {
 public:
  explicit Inliner(const CfaNetwork& src)
      : src_(src), scratch_vars_(src.callees.size()) {}

  CfaNetwork run() {
    CfaNetwork out;
    out.ast = src_.ast;
    out.entry_name = src_.entry_name;
    out.variables = src_.variables;

    // expand callees bottom-up so every inlined body is itself call-free
    expanded_.resize(src_.callees.size());
    done_.assign(src_.callees.size(), false);
    for (size_t i = 0; i < src_.callees.size(); ++i) expand_callee(i);

    out.main = src_.main;
    splice_calls(out.main, out.variables);
    return out;
  }

 private:
  void expand_callee(size_t i) {
    if (done_[i]) return;
    done_[i] = true;  // acyclic call graph, so no revisit during expansion
    Automaton a = src_.callees[i];
    // ensure nested callees are expanded first
    for (const Transition& t : a.transitions)
      if (t.call_index >= 0) {
        int ci = src_.callee_index(
            a.call_sites[static_cast<size_t>(t.call_index)].callee);
        if (ci >= 0) expand_callee(static_cast<size_t>(ci));
      }
    // callee bodies reference their own variable names; instance renaming
    // happens at each splice, so locals stay as declared here
    splice_calls(a, scratch_vars_[i]);
    expanded_[i] = std::move(a);
  }

  // Replaces every call transition in a with inlined copies of the
  // (already expanded) callee. new_vars receives fresh instance variables.
  void splice_calls(Automaton& a, std::vector<Variable>& new_vars) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t ti = 0; ti < a.transitions.size(); ++ti) {
        if (a.transitions[ti].call_index < 0) continue;
        splice_one(a, ti, new_vars);
        changed = true;
        break;  // transition list was rebuilt; restart scan
      }
    }
  }

  void splice_one(Automaton& a, size_t ti, std::vector<Variable>& new_vars) {
    Transition call = a.transitions[ti];
    CallSite cs = a.call_sites[static_cast<size_t>(call.call_index)];
    int ci = src_.callee_index(cs.callee);
    if (ci < 0) throw std::logic_error("call to unknown callee");
    const Automaton& callee = expanded_[static_cast<size_t>(ci)];
    const std::vector<Variable>& cvars = src_.callee_vars[static_cast<size_t>(ci)];
    int instance = ++instance_counter_;

    // fresh instance variables, all activation-scoped
    std::unordered_map<Symbol, Symbol, SymbolHash> rename;
    std::string prefix =
        std::string(cs.callee.str()) + "#" + std::to_string(instance) + ".";
    for (const Variable& v : cvars) {
      Symbol fresh = Symbol::intern(prefix + std::string(v.name.str()));
      rename.emplace(v.name, fresh);
      new_vars.push_back(Variable{fresh, v.type, VarKind::Temp, std::nullopt,
                                  v.domain, v.span});
    }
    // instance vars from the callee's own inlining (already prefixed)
    for (const Variable& v : scratch_vars_[static_cast<size_t>(ci)]) {
      Symbol fresh = Symbol::intern(prefix + std::string(v.name.str()));
      rename.emplace(v.name, fresh);
      new_vars.push_back(Variable{fresh, v.type, VarKind::Temp, std::nullopt,
                                  v.domain, v.span});
    }

    // copy callee locations/transitions with remapped ids and renamed vars
    int base = static_cast<int>(a.locations.size());
    for (const Location& l : callee.locations) {
      Location nl = l;
      nl.id = base + l.id;
      if (nl.assertion) nl.assertion = subst_expr(nl.assertion, rename);
      a.locations.push_back(nl);
    }
    for (const Transition& t : callee.transitions) {
      Transition nt;
      nt.source = base + t.source;
      nt.target = base + t.target;
      nt.guard = subst_expr(t.guard, rename);
      nt.havoc = false;
      for (const Assignment& as : t.assigns) {
        Assignment na;
        auto it = rename.find(as.var);
        na.var = it == rename.end() ? as.var : it->second;
        na.index = subst_expr(as.index, rename);
        na.value = subst_expr(as.value, rename);
        na.span = as.span;
        nt.assigns.push_back(std::move(na));
      }
      a.transitions.push_back(std::move(nt));
    }

    // entry glue: activation inits in declaration order, then input binds
    Transition enter;
    enter.source = call.source;
    enter.target = base + callee.initial;
    enter.guard = call.guard;
    for (const Variable& v : cvars) {
      VarDecl d{v.name, v.type, v.kind, v.init, v.span};
      d.name = rename.at(v.name);
      append_init_assigns(d, enter.assigns);
    }
    for (const auto& [formal, actual] : cs.in_binds) {
      Assignment as;
      as.var = rename.at(formal);
      as.value = actual;  // caller-scope expression, no renaming
      as.span = cs.span;
      enter.assigns.push_back(std::move(as));
    }

    // exit glue: copy outputs into caller lvalues
    Transition leave;
    leave.source = base + callee.exit;
    leave.target = call.target;
    for (const auto& [formal, lv] : cs.out_binds) {
      const Variable* fv = nullptr;
      for (const Variable& v : cvars)
        if (v.name == formal) fv = &v;
      Assignment as;
      as.var = lv.var;
      as.index = lv.index;
      as.value = Expr::var_ref(rename.at(formal),
                               fv ? fv->type.base : Scalar::Bool, lv.span);
      as.span = lv.span;
      leave.assigns.push_back(std::move(as));
    }

    // rebuild the transition list with the call removed
    std::vector<Transition> rebuilt;
    rebuilt.reserve(a.transitions.size() + 1);
    for (size_t i = 0; i < a.transitions.size(); ++i) {
      if (i == ti) {
        rebuilt.push_back(std::move(enter));
      } else {
        rebuilt.push_back(std::move(a.transitions[i]));
      }
    }
    rebuilt.push_back(std::move(leave));
    a.transitions = std::move(rebuilt);
  }

  static void append_init_assigns(const VarDecl& v,
                                  std::vector<Assignment>& out) {
    int32_t init = v.init.value_or(0);
    if (!v.type.array) {
      Assignment as;
      as.var = v.name;
      as.value = Expr::literal(v.type.base, init, v.span);
      as.span = v.span;
      out.push_back(std::move(as));
      return;
    }
    for (int64_t i = v.type.lo; i <= v.type.hi; ++i) {
      Assignment as;
      as.var = v.name;
      as.index = Expr::literal(Scalar::Int, static_cast<int32_t>(i), v.span);
      as.value = Expr::literal(v.type.base, init, v.span);
      as.span = v.span;
      out.push_back(std::move(as));
    }
  }

  const CfaNetwork& src_;
  std::vector<Automaton> expanded_;
  std::vector<bool> done_;
  // per-callee instance variables created while expanding that callee
  std::vector<std::vector<Variable>> scratch_vars_;
  int instance_counter_ = 0;
};

}  // namespace detail

// Replaces every call site with a renamed copy of the callee body.
// The result has no call sites; engine verdicts are unchanged.
inline CfaNetwork inline_callees(const CfaNetwork& net) {
  if (!net.main.has_call_sites() && net.callees.empty()) return net;
  detail::Inliner inl(net);
  CfaNetwork out = inl.run();
  out.callees.clear();
  out.callee_vars.clear();
  return out;
}

}  // namespace stverif
