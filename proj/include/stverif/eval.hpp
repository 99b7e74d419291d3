#pragma once
// Shared execution semantics for the checker, replay, and reductions:
// flat value store, wrapping integer arithmetic, runtime faults, and a
// single-cycle CFA walker.
//
// INT/DINT arithmetic wraps two's-complement at the declared width.
// Division by zero and out-of-range array indexing raise EvalFault; both
// carry the source span of the offending expression.
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "stverif/cfa.hpp"

namespace stverif {

struct EvalFault {
  enum class Kind { DivByZero, IndexOutOfRange };
  Kind kind;
  Span span;

  const char* what() const {
    return kind == Kind::DivByZero ? "division by zero"
                                   : "array index out of range";
  }
};

// Flat slot layout over a network's variable list. Arrays occupy
// element_count() consecutive slots.
class Layout {
 public:
  struct Slot {
    Symbol name;
    ElementaryType type;
    VarKind kind;
    std::optional<int32_t> init;
    uint32_t offset = 0;
  };

  explicit Layout(const std::vector<Variable>& vars) {
    uint32_t off = 0;
    slots_.reserve(vars.size());
    for (const Variable& v : vars) {
      Slot s;
      s.name = v.name;
      s.type = v.type;
      s.kind = v.kind;
      s.init = v.init;
      s.offset = off;
      index_.emplace(v.name, static_cast<int>(slots_.size()));
      slots_.push_back(s);
      off += static_cast<uint32_t>(v.type.element_count());
    }
    total_ = off;
  }

  const Slot& slot(Symbol name) const {
    auto it = index_.find(name);
    if (it == index_.end())
      throw std::logic_error("no slot for variable " + std::string(name.str()));
    return slots_[static_cast<size_t>(it->second)];
  }

  const Slot* find(Symbol name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr
                              : &slots_[static_cast<size_t>(it->second)];
  }

  const std::vector<Slot>& slots() const { return slots_; }
  uint32_t size() const { return total_; }

 private:
  std::vector<Slot> slots_;
  std::unordered_map<Symbol, int, SymbolHash> index_;
  uint32_t total_ = 0;
};

inline int32_t wrap_to(Scalar t, int64_t v) {
  switch (t) {
    case Scalar::Bool: return v != 0 ? 1 : 0;
    case Scalar::Int: return static_cast<int16_t>(static_cast<uint64_t>(v));
    case Scalar::Dint: return static_cast<int32_t>(static_cast<uint64_t>(v));
  }
  return 0;
}

class Store {
 public:
  explicit Store(const Layout& layout)
      : layout_(&layout), values_(layout.size(), 0) {
    for (const Layout::Slot& s : layout.slots())
      if (s.init)
        for (int32_t i = 0; i < s.type.element_count(); ++i)
          values_[s.offset + static_cast<uint32_t>(i)] = *s.init;
  }

  int32_t get(Symbol name) const { return values_[layout_->slot(name).offset]; }

  void set(Symbol name, int32_t v) {
    const Layout::Slot& s = layout_->slot(name);
    values_[s.offset] = wrap_to(s.type.base, v);
  }

  int32_t array_get(Symbol name, int32_t index, Span at) const {
    const Layout::Slot& s = layout_->slot(name);
    if (index < s.type.lo || index > s.type.hi)
      throw EvalFault{EvalFault::Kind::IndexOutOfRange, at};
    return values_[s.offset + static_cast<uint32_t>(index - s.type.lo)];
  }

  void array_set(Symbol name, int32_t index, int32_t v, Span at) {
    const Layout::Slot& s = layout_->slot(name);
    if (index < s.type.lo || index > s.type.hi)
      throw EvalFault{EvalFault::Kind::IndexOutOfRange, at};
    values_[s.offset + static_cast<uint32_t>(index - s.type.lo)] =
        wrap_to(s.type.base, v);
  }

  const Layout& layout() const { return *layout_; }
  const std::vector<int32_t>& values() const { return values_; }
  std::vector<int32_t>& values() { return values_; }

  // Valuation of persistent (non-temp) variables only; the engine's state.
  std::vector<int32_t> persistent_values() const {
    std::vector<int32_t> out;
    for (const Layout::Slot& s : layout_->slots()) {
      if (s.kind == VarKind::Temp) continue;
      for (int32_t i = 0; i < s.type.element_count(); ++i)
        out.push_back(values_[s.offset + static_cast<uint32_t>(i)]);
    }
    return out;
  }

 private:
  const Layout* layout_;
  std::vector<int32_t> values_;
};

// --- expression evaluation --------------------------------------------------

inline int32_t eval_expr(const Expr& e, const Store& s) {
  switch (e.kind) {
    case Expr::Kind::Literal:
      return e.value;
    case Expr::Kind::VarRef:
      return s.get(e.var);
    case Expr::Kind::ArrayRead:
      return s.array_get(e.var, eval_expr(*e.index, s), e.span);
    case Expr::Kind::Unary: {
      int32_t v = eval_expr(*e.a, s);
      if (e.un == UnOp::Not) return v ? 0 : 1;
      return wrap_to(e.type, -static_cast<int64_t>(v));
    }
    case Expr::Kind::Binary: {
      // AND/OR short-circuit so guarded divisions behave as written
      if (e.bin == BinOp::And) {
        if (!eval_expr(*e.a, s)) return 0;
        return eval_expr(*e.b, s) ? 1 : 0;
      }
      if (e.bin == BinOp::Or) {
        if (eval_expr(*e.a, s)) return 1;
        return eval_expr(*e.b, s) ? 1 : 0;
      }
      int64_t a = eval_expr(*e.a, s);
      int64_t b = eval_expr(*e.b, s);
      switch (e.bin) {
        case BinOp::Xor: return (a != 0) != (b != 0) ? 1 : 0;
        case BinOp::Eq: return a == b;
        case BinOp::Ne: return a != b;
        case BinOp::Lt: return a < b;
        case BinOp::Le: return a <= b;
        case BinOp::Gt: return a > b;
        case BinOp::Ge: return a >= b;
        case BinOp::Add: return wrap_to(e.type, a + b);
        case BinOp::Sub: return wrap_to(e.type, a - b);
        case BinOp::Mul: return wrap_to(e.type, a * b);
        case BinOp::Div:
          if (b == 0) throw EvalFault{EvalFault::Kind::DivByZero, e.span};
          return wrap_to(e.type, a / b);
        case BinOp::Mod:
          if (b == 0) throw EvalFault{EvalFault::Kind::DivByZero, e.span};
          return wrap_to(e.type, a % b);
        default:
          throw std::logic_error("unhandled binary operator");
      }
    }
    case Expr::Kind::Nondet:
      throw std::logic_error("nondet marker reached evaluation");
  }
  throw std::logic_error("unhandled expression kind");
}

inline bool eval_guard(const ExprPtr& guard, const Store& s) {
  return !guard || eval_expr(*guard, s) != 0;
}

inline void apply_assignment(const Assignment& a, Store& s) {
  int32_t v = eval_expr(*a.value, s);
  if (a.index)
    s.array_set(a.var, eval_expr(*a.index, s), v, a.span);
  else
    s.set(a.var, v);
}

// --- single-cycle walking ---------------------------------------------------

// Outgoing-transition adjacency in builder order; the walker takes the
// first enabled transition, which implements branch priority.
class Adjacency {
 public:
  explicit Adjacency(const Automaton& a) : out_(a.locations.size()) {
    for (size_t i = 0; i < a.transitions.size(); ++i)
      out_[static_cast<size_t>(a.transitions[i].source)].push_back(
          static_cast<int>(i));
  }

  const std::vector<int>& outgoing(int loc) const {
    return out_[static_cast<size_t>(loc)];
  }

 private:
  std::vector<std::vector<int>> out_;
};

enum class CycleOutcome { Completed, StepLimit };

// Walks one scan cycle from the havoc transition's target to end-of-cycle.
// The caller has already applied the havoc transition (inputs + resets).
// on_anchor(location, store) fires at every assertion-anchor location.
template <class AnchorFn>
CycleOutcome run_cycle_body(const Automaton& a, const Adjacency& adj,
                            Store& s, uint64_t max_steps, AnchorFn&& on_anchor) {
  int loc = -1;
  for (int ti : adj.outgoing(a.cycle_start)) {
    if (a.transitions[static_cast<size_t>(ti)].havoc) {
      loc = a.transitions[static_cast<size_t>(ti)].target;
      break;
    }
  }
  if (loc < 0) throw std::logic_error("automaton has no havoc transition");

  uint64_t steps = 0;
  while (loc != a.end_of_cycle) {
    if (a.loc(loc).role == LocRole::AssertionAnchor) on_anchor(a.loc(loc), s);
    const std::vector<int>& outs = adj.outgoing(loc);
    int taken = -1;
    for (int ti : outs) {
      const Transition& t = a.transitions[static_cast<size_t>(ti)];
      if (eval_guard(t.guard, s)) {
        taken = ti;
        break;
      }
    }
    if (taken < 0)
      throw std::logic_error("no enabled transition at location " +
                             std::to_string(loc));
    const Transition& t = a.transitions[static_cast<size_t>(taken)];
    if (t.call_index >= 0)
      throw std::logic_error("call site reached the cycle walker");
    for (const Assignment& as : t.assigns) apply_assignment(as, s);
    loc = t.target;
    if (++steps > max_steps) return CycleOutcome::StepLimit;
  }
  if (a.loc(loc).role == LocRole::AssertionAnchor) on_anchor(a.loc(loc), s);
  return CycleOutcome::Completed;
}

// Applies the havoc transition's literal assignments (temp resets) and the
// chosen input values. inputs maps input variable name to this cycle's value.
inline void apply_cycle_inputs(
    const Automaton& a, Store& s,
    const std::unordered_map<Symbol, int32_t, SymbolHash>& inputs) {
  for (const Transition& t : a.transitions) {
    if (!t.havoc) continue;
    for (const Assignment& as : t.assigns) {
      if (as.value->kind == Expr::Kind::Nondet) {
        auto it = inputs.find(as.var);
        if (it == inputs.end())
          throw std::logic_error("missing input value for " +
                                 std::string(as.var.str()));
        s.set(as.var, it->second);
      } else {
        apply_assignment(as, s);
      }
    }
    return;
  }
  throw std::logic_error("automaton has no havoc transition");
}

}  // namespace stverif
