#pragma once
// Brute-force oracle: enumerates every input sequence up to a cycle bound
// and interprets the source AST directly. Shares nothing with the engine's
// CFA exploration; its only common ground is the language definition.
// Intentionally naive: no visited set, no reductions, full enumeration.
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "stverif/engine.hpp"
#include "stverif/requirements.hpp"

namespace stverif {

namespace oracle_detail {

inline int32_t owrap(Scalar t, int64_t v) {
  if (t == Scalar::Int) return static_cast<int16_t>(static_cast<uint64_t>(v));
  if (t == Scalar::Dint) return static_cast<int32_t>(static_cast<uint64_t>(v));
  return v != 0;
}

struct Frame {
  const Unit* unit = nullptr;
  std::unordered_map<Symbol, int32_t, SymbolHash> scalars;
  std::unordered_map<Symbol, std::vector<int32_t>, SymbolHash> arrays;

  void init_var(const VarDecl& d) {
    int32_t v = d.init.value_or(0);
    if (d.type.array)
      arrays[d.name] =
          std::vector<int32_t>(static_cast<size_t>(d.type.element_count()), v);
    else
      scalars[d.name] = v;
  }

  const VarDecl* decl(Symbol s) const { return unit->find_var(s); }
};

class Interp {
 public:
  Interp(const TypedAst& ast, const Unit& entry) : ast_(ast), entry_(entry) {}

  // violation observer: called with (anchor_id, frame) at assert comments
  template <class Obs>
  void run_cycle(Frame& f, Obs&& obs) {
    steps_ = 0;
    exec_block(entry_.body, f, obs);
  }

  int32_t eval(const Expr& e, const Frame& f) const {
    switch (e.kind) {
      case Expr::Kind::Literal:
        return e.value;
      case Expr::Kind::VarRef: {
        auto it = f.scalars.find(e.var);
        if (it == f.scalars.end())
          throw std::logic_error("oracle: unbound variable " +
                                 std::string(e.var.str()));
        return it->second;
      }
      case Expr::Kind::ArrayRead: {
        const VarDecl* d = f.decl(e.var);
        int32_t idx = eval(*e.index, f);
        if (!d || idx < d->type.lo || idx > d->type.hi)
          throw EvalFault{EvalFault::Kind::IndexOutOfRange, e.span};
        return f.arrays.at(e.var)[static_cast<size_t>(idx - d->type.lo)];
      }
      case Expr::Kind::Unary:
        if (e.un == UnOp::Not) return eval(*e.a, f) ? 0 : 1;
        return owrap(e.type, -static_cast<int64_t>(eval(*e.a, f)));
      case Expr::Kind::Binary: {
        if (e.bin == BinOp::And)
          return eval(*e.a, f) ? (eval(*e.b, f) ? 1 : 0) : 0;
        if (e.bin == BinOp::Or)
          return eval(*e.a, f) ? 1 : (eval(*e.b, f) ? 1 : 0);
        int64_t a = eval(*e.a, f);
        int64_t b = eval(*e.b, f);
        switch (e.bin) {
          case BinOp::Xor: return (a != 0) != (b != 0) ? 1 : 0;
          case BinOp::Eq: return a == b;
          case BinOp::Ne: return a != b;
          case BinOp::Lt: return a < b;
          case BinOp::Le: return a <= b;
          case BinOp::Gt: return a > b;
          case BinOp::Ge: return a >= b;
          case BinOp::Add: return owrap(e.type, a + b);
          case BinOp::Sub: return owrap(e.type, a - b);
          case BinOp::Mul: return owrap(e.type, a * b);
          case BinOp::Div:
            if (b == 0) throw EvalFault{EvalFault::Kind::DivByZero, e.span};
            return owrap(e.type, a / b);
          case BinOp::Mod:
            if (b == 0) throw EvalFault{EvalFault::Kind::DivByZero, e.span};
            return owrap(e.type, a % b);
          default:
            throw std::logic_error("oracle: unexpected operator");
        }
      }
      case Expr::Kind::Nondet:
        throw std::logic_error("oracle: nondet in source expression");
    }
    throw std::logic_error("oracle: unexpected expression kind");
  }

 private:
  enum class Signal { None, Return, Exit };

  void store(const LValue& lv, int32_t v, Frame& f) {
    const VarDecl* d = f.decl(lv.var);
    if (!d) throw std::logic_error("oracle: unbound lvalue");
    if (lv.index) {
      int32_t idx = eval(*lv.index, f);
      if (idx < d->type.lo || idx > d->type.hi)
        throw EvalFault{EvalFault::Kind::IndexOutOfRange, lv.span};
      f.arrays[lv.var][static_cast<size_t>(idx - d->type.lo)] =
          owrap(d->type.base, v);
    } else {
      f.scalars[lv.var] = owrap(d->type.base, v);
    }
  }

  template <class Obs>
  Signal exec_block(const std::vector<Stmt>& body, Frame& f, Obs&& obs) {
    for (const Stmt& s : body) {
      Signal sig = exec_stmt(s, f, obs);
      if (sig != Signal::None) return sig;
    }
    return Signal::None;
  }

  template <class Obs>
  Signal exec_stmt(const Stmt& s, Frame& f, Obs&& obs) {
    if (++steps_ > step_cap_)
      throw std::runtime_error("oracle: step limit exceeded");
    switch (s.kind) {
      case Stmt::Kind::Assign:
        store(s.lhs, eval(*s.rhs, f), f);
        return Signal::None;
      case Stmt::Kind::AssertComment:
        obs(s.anchor_id, f);
        return Signal::None;
      case Stmt::Kind::If: {
        for (const IfArm& arm : s.arms)
          if (eval(*arm.cond, f)) return exec_block(arm.body, f, obs);
        return exec_block(s.else_body, f, obs);
      }
      case Stmt::Kind::Case: {
        int64_t sel = eval(*s.selector, f);
        for (const CaseBranch& br : s.branches)
          for (auto [lo, hi] : br.ranges)
            if (sel >= lo && sel <= hi) return exec_block(br.body, f, obs);
        return exec_block(s.else_body, f, obs);
      }
      case Stmt::Kind::For: {
        const VarDecl* d = f.decl(s.for_var);
        Scalar ty = d ? d->type.base : Scalar::Int;
        f.scalars[s.for_var] = owrap(ty, eval(*s.from, f));
        int32_t limit = eval(*s.to, f);  // evaluated once at entry
        int32_t step = s.by;
        while (step > 0 ? f.scalars[s.for_var] <= limit
                        : f.scalars[s.for_var] >= limit) {
          Signal sig = exec_block(s.body, f, obs);
          if (sig == Signal::Return) return sig;
          if (sig == Signal::Exit) break;
          f.scalars[s.for_var] =
              owrap(ty, static_cast<int64_t>(f.scalars[s.for_var]) + step);
          if (++steps_ > step_cap_)
            throw std::runtime_error("oracle: step limit exceeded");
        }
        return Signal::None;
      }
      case Stmt::Kind::While:
        while (eval(*s.cond, f)) {
          Signal sig = exec_block(s.body, f, obs);
          if (sig == Signal::Return) return sig;
          if (sig == Signal::Exit) break;
          if (++steps_ > step_cap_)
            throw std::runtime_error("oracle: step limit exceeded");
        }
        return Signal::None;
      case Stmt::Kind::Repeat:
        while (true) {
          Signal sig = exec_block(s.body, f, obs);
          if (sig == Signal::Return) return sig;
          if (sig == Signal::Exit) break;
          if (eval(*s.cond, f)) break;
          if (++steps_ > step_cap_)
            throw std::runtime_error("oracle: step limit exceeded");
        }
        return Signal::None;
      case Stmt::Kind::Call:
        exec_call(s, f, obs);
        return Signal::None;
      case Stmt::Kind::Return:
        return Signal::Return;
      case Stmt::Kind::Exit:
        return Signal::Exit;
    }
    return Signal::None;
  }

  template <class Obs>
  void exec_call(const Stmt& s, Frame& caller, Obs&& obs) {
    const Unit* callee = ast_.find_unit(s.callee);
    if (!callee) throw std::logic_error("oracle: missing callee");
    Frame f;
    f.unit = callee;
    for (const VarDecl& d : callee->vars) f.init_var(d);
    for (const auto& [formal, actual] : s.in_binds)
      f.scalars[formal] = owrap(callee->find_var(formal)->type.base,
                                eval(*actual, caller));
    exec_block(callee->body, f, obs);
    for (const auto& [formal, lv] : s.out_binds)
      store(lv, f.scalars.at(formal), caller);
  }

  const TypedAst& ast_;
  const Unit& entry_;
  uint64_t steps_ = 0;
  uint64_t step_cap_ = 1'000'000;
};

}  // namespace oracle_detail

// Exhaustive bounded check by direct AST interpretation. Tractability
// guard: input combinations per cycle <= 2^20 and cycles <= 3.
inline Verdict brute_force_oracle(const VerificationProblem& p, int cycles) {
  using oracle_detail::Frame;
  using oracle_detail::Interp;

  if (cycles < 1 || cycles > 3)
    throw std::invalid_argument("oracle: cycle bound must be in [1, 3]");
  const TypedAst& ast = *p.net.ast;
  const Unit* entry = ast.find_unit(p.net.entry_name);
  if (!entry) throw std::invalid_argument("oracle: entry unit missing");

  // input domains come from the problem's network so reduced domains are
  // honored; declaration order matches the entry unit
  struct In {
    Symbol name;
    Domain dom;
    Scalar type;
  };
  std::vector<In> ins;
  uint64_t combos = 1;
  for (const VarDecl& d : entry->vars) {
    if (d.kind != VarKind::Input) continue;
    const Variable* nv = p.net.find_variable(d.name);
    Domain dom = nv ? nv->domain : full_domain(d.type.base);
    combos *= dom.size();
    if (combos > (1u << 20))
      throw std::invalid_argument("oracle: input combination count too large");
    ins.push_back(In{d.name, dom, d.type.base});
  }
  // full enumeration visits combos^cycles sequences
  uint64_t sequences = 1;
  for (int i = 0; i < cycles; ++i) {
    sequences *= combos;
    if (sequences > (1u << 20))
      throw std::invalid_argument("oracle: sequence count too large");
  }

  Interp interp(ast, *entry);

  // best violating candidate: minimal cycle, then lexicographically
  // smallest combo-index sequence
  struct Candidate {
    int cycle = 0;
    std::vector<uint64_t> seq;
    bool fault = false;
    Violation violation;
    std::vector<CycleRecord> cycles;
  };
  std::optional<Candidate> best;
  auto better = [&](const Candidate& c) {
    if (!best) return true;
    if (c.cycle != best->cycle) return c.cycle < best->cycle;
    for (size_t i = 0; i < c.seq.size() && i < best->seq.size(); ++i)
      if (c.seq[i] != best->seq[i]) return c.seq[i] < best->seq[i];
    return false;
  };

  Frame init;
  init.unit = entry;
  for (const VarDecl& d : entry->vars) init.init_var(d);

  std::vector<uint64_t> seq;
  std::vector<CycleRecord> records;

  // end-of-cycle persistent valuation in declaration order
  auto snapshot = [&](const Frame& f) {
    std::vector<std::pair<std::string, int32_t>> out;
    for (const VarDecl& d : entry->vars) {
      if (d.kind == VarKind::Temp) continue;
      if (!d.type.array) {
        out.emplace_back(std::string(d.name.str()), f.scalars.at(d.name));
      } else {
        const auto& arr = f.arrays.at(d.name);
        for (int64_t i = d.type.lo; i <= d.type.hi; ++i)
          out.emplace_back(
              std::string(d.name.str()) + "[" + std::to_string(i) + "]",
              arr[static_cast<size_t>(i - d.type.lo)]);
      }
    }
    return out;
  };

  auto recurse = [&](auto&& self, int cycle, const Frame& env) -> void {
    for (uint64_t ci = 0; ci < combos; ++ci) {
      Frame f = env;
      CycleRecord rec;
      uint64_t rest = ci;
      for (size_t i = ins.size(); i-- > 0;) {
        uint64_t sz = ins[i].dom.size();
        int32_t val = stverif::detail::domain_value_at(ins[i].dom, rest % sz);
        rest /= sz;
        f.scalars[ins[i].name] = val;
        rec.inputs.emplace_back(ins[i].name, val);
      }
      std::reverse(rec.inputs.begin(), rec.inputs.end());
      for (const VarDecl& d : entry->vars)
        if (d.kind == VarKind::Temp) f.init_var(d);

      seq.push_back(ci);
      bool violated = false;
      bool faulted = false;
      Violation vio;
      try {
        interp.run_cycle(f, [&](int anchor_id, const Frame& here) {
          if (violated) return;
          if (p.property.at != Property::At::Anchor) return;
          if (anchor_id != p.property.anchor_id) return;
          if (interp.eval(*p.property.expr, here) == 0) {
            violated = true;
            vio.anchor_id = anchor_id;
            vio.fault = false;
            vio.detail = expr_to_string(p.property.expr);
          }
        });
        if (!violated && p.property.at == Property::At::EndOfCycle &&
            interp.eval(*p.property.expr, f) == 0) {
          violated = true;
          vio.anchor_id = -1;
          vio.detail = expr_to_string(p.property.expr);
        }
      } catch (const EvalFault& flt) {
        if (!violated) {
          faulted = true;
          vio.fault = true;
          vio.detail = flt.what();
          vio.span = flt.span;
        }
      }
      rec.end_values = snapshot(f);
      records.push_back(rec);

      if (violated || faulted) {
        Candidate c;
        c.cycle = cycle;
        c.seq = seq;
        c.fault = faulted;
        c.violation = vio;
        c.violation.cycle = cycle;
        c.cycles = records;
        if (better(c)) best = std::move(c);
      } else if (cycle < cycles) {
        self(self, cycle + 1, f);
      }
      records.pop_back();
      seq.pop_back();
    }
  };
  recurse(recurse, 1, init);

  Verdict out;
  out.stats.branching_factor = combos;
  if (!best) {
    out.kind = VerdictKind::BoundReached;
    out.stats.cycles_completed = cycles;
    return out;
  }
  out.kind = best->fault ? VerdictKind::Fault : VerdictKind::Violated;
  Trace tr;
  tr.cycles = best->cycles;
  tr.violation = best->violation;
  out.trace = std::move(tr);
  return out;
}

}  // namespace stverif
