#pragma once
// Built-in explicit-state model checker. Breadth-first over scan cycles:
// the frontier holds cycle-start valuations of persistent variables; each
// cycle branches over the full input domain product. Deterministic
// first-violation order: cycles ascending, frontier states in discovery
// order, input combinations in declaration order with values ascending,
// nondeterministic assignment forks in ascending value order.
#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "stverif/cfa.hpp"
#include "stverif/eval.hpp"
#include "stverif/printing.hpp"
#include "stverif/requirements.hpp"
#include "stverif/trace.hpp"

namespace stverif {

enum class VerdictKind { Satisfied, Violated, BoundReached, Fault, Unknown };

inline const char* verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::Satisfied: return "Satisfied";
    case VerdictKind::Violated: return "Violated";
    case VerdictKind::BoundReached: return "BoundReached";
    case VerdictKind::Fault: return "Fault";
    case VerdictKind::Unknown: return "Unknown";
  }
  return "?";
}

struct EngineStats {
  uint64_t states_explored = 0;  // distinct cycle-start states discovered
  uint64_t peak_frontier = 0;
  int cycles_completed = 0;
  double wall_ms = 0.0;
  uint64_t branching_factor = 0;  // input combinations per cycle
  bool state_cap_hit = false;
  bool step_cap_hit = false;
};

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  std::optional<Trace> trace;  // present for Violated and Fault
  EngineStats stats;
  std::string note;
};

struct EngineConfig {
  int K = 10;
  uint64_t max_states = 10'000'000;
  uint64_t max_steps_per_cycle = 1'000'000;
};

namespace detail {

struct ValuationHash {
  size_t operator()(const std::vector<int32_t>& v) const {
    uint64_t h = 1469598103934665603ull;
    for (int32_t x : v) {
      uint32_t u = static_cast<uint32_t>(x);
      for (int i = 0; i < 4; ++i) {
        h ^= (u >> (i * 8)) & 0xff;
        h *= 1099511628211ull;
      }
    }
    return static_cast<size_t>(h);
  }
};

// Domain element access without materializing ranges.
inline int32_t domain_value_at(const Domain& d, uint64_t idx) {
  if (d.values) return (*d.values)[static_cast<size_t>(idx)];
  return static_cast<int32_t>(static_cast<int64_t>(d.lo) +
                              static_cast<int64_t>(idx));
}

inline std::vector<std::pair<std::string, int32_t>> render_persistent(
    const Layout& layout, const std::vector<int32_t>& pvals) {
  std::vector<std::pair<std::string, int32_t>> out;
  size_t i = 0;
  for (const Layout::Slot& s : layout.slots()) {
    if (s.kind == VarKind::Temp) continue;
    if (!s.type.array) {
      out.emplace_back(std::string(s.name.str()), pvals[i++]);
    } else {
      for (int64_t e = s.type.lo; e <= s.type.hi; ++e)
        out.emplace_back(
            std::string(s.name.str()) + "[" + std::to_string(e) + "]",
            pvals[i++]);
    }
  }
  return out;
}

class Checker {
 public:
  Checker(const VerificationProblem& p, const EngineConfig& cfg)
      : net_(p.net),
        prop_(p.property),
        cfg_(cfg),
        layout_(net_.variables),
        adj_(net_.main) {
    if (net_.main.has_call_sites())
      throw std::invalid_argument(
          "engine requires an inlined network (call sites present)");
    for (const Variable& v : net_.variables)
      if (v.kind == VarKind::Input) inputs_.push_back(&v);
    for (const Transition& t : net_.main.transitions)
      if (t.havoc) body_entry_ = t.target;
    if (body_entry_ < 0)
      throw std::invalid_argument("network has no havoc transition");
  }

  Verdict run() {
    auto t0 = std::chrono::steady_clock::now();
    Verdict v = explore();
    v.stats.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    return v;
  }

 private:
  struct StateRec {
    std::vector<int32_t> pvals;  // cycle-start persistent valuation
    int parent = -1;
    std::vector<std::pair<Symbol, int32_t>> inputs;  // combo that led here
  };

  uint64_t branching_factor() const {
    uint64_t prod = 1;
    for (const Variable* v : inputs_) {
      uint64_t s = v->domain.size();
      if (s == 0) return 0;
      if (prod > UINT64_MAX / s) return UINT64_MAX;  // saturate
      prod *= s;
    }
    return prod;
  }

  std::vector<std::pair<Symbol, int32_t>> combo_values(uint64_t index) const {
    // last declared input cycles fastest: lexicographic ascending order
    std::vector<std::pair<Symbol, int32_t>> out(inputs_.size());
    for (size_t i = inputs_.size(); i-- > 0;) {
      uint64_t s = inputs_[i]->domain.size();
      out[i] = {inputs_[i]->name,
                domain_value_at(inputs_[i]->domain, index % s)};
      index /= s;
    }
    return out;
  }

  Store make_cycle_store(const std::vector<int32_t>& pvals) const {
    Store s(layout_);  // temps at defaults
    size_t i = 0;
    for (const Layout::Slot& slot : layout_.slots()) {
      if (slot.kind == VarKind::Temp) continue;
      for (int32_t e = 0; e < slot.type.element_count(); ++e)
        s.values()[slot.offset + static_cast<uint32_t>(e)] = pvals[i++];
    }
    return s;
  }

  void apply_havoc(Store& s,
                   const std::vector<std::pair<Symbol, int32_t>>& combo) const {
    for (const Transition& t : net_.main.transitions) {
      if (!t.havoc) continue;
      size_t next_input = 0;
      for (const Assignment& as : t.assigns) {
        if (as.value->kind == Expr::Kind::Nondet) {
          // havoc assigns follow declaration order, same as combo
          while (next_input < combo.size() && combo[next_input].first != as.var)
            ++next_input;
          if (next_input == combo.size())
            throw std::logic_error("havoc input missing from combination");
          s.set(as.var, combo[next_input].second);
        } else {
          apply_assignment(as, s);
        }
      }
      return;
    }
    throw std::logic_error("network has no havoc transition");
  }

  // --- intra-cycle exploration with nondet forking --------------------------

  enum class StopKind { None, Violated, Fault, StepCap };

  struct CycleResult {
    StopKind stop = StopKind::None;
    Violation violation;
    std::vector<std::pair<std::string, int32_t>> end_values;
    std::vector<std::vector<int32_t>> successors;  // completed branch states
  };

  // Walks one branch from loc; forks at nondet assignments. Returns true to
  // abort the whole exploration (result_.stop set).
  bool walk(int loc, Store store, uint64_t& steps, bool violated,
            Violation pending, CycleResult& res) {
    try {
      while (true) {
        const Location& l = net_.main.loc(loc);
        if (l.role == LocRole::AssertionAnchor && !violated &&
            prop_.at == Property::At::Anchor && l.anchor_id == prop_.anchor_id) {
          if (eval_expr(*l.assertion, store) == 0) {
            violated = true;
            pending.location_id = l.id;
            pending.anchor_id = l.anchor_id;
            pending.fault = false;
            pending.detail = expr_to_string(l.assertion);
            pending.span = l.assertion->span;
          }
        }
        if (loc == net_.main.end_of_cycle) break;

        const std::vector<int>& outs = adj_.outgoing(loc);
        const Transition* taken = nullptr;
        for (int ti : outs) {
          const Transition& t = net_.main.transitions[static_cast<size_t>(ti)];
          if (t.havoc) continue;  // only out of cycle-start, not walked here
          if (eval_guard(t.guard, store)) {
            taken = &t;
            break;
          }
        }
        if (!taken)
          throw std::logic_error("no enabled transition at location " +
                                 std::to_string(loc));
        if (++steps > cfg_.max_steps_per_cycle) {
          res.stop = StopKind::StepCap;
          return true;
        }

        // nondet assignments fork the walk, values ascending
        size_t nd = taken->assigns.size();
        for (size_t i = 0; i < taken->assigns.size(); ++i)
          if (taken->assigns[i].value->kind == Expr::Kind::Nondet) {
            nd = i;
            break;
          }
        if (nd < taken->assigns.size()) {
          return fork(*taken, store, steps, violated, pending, res);
        }
        for (const Assignment& as : taken->assigns)
          apply_assignment(as, store);
        loc = taken->target;
      }

      // end of cycle reached
      if (!violated && prop_.at == Property::At::EndOfCycle) {
        if (eval_expr(*prop_.expr, store) == 0) {
          violated = true;
          pending.location_id = net_.main.end_of_cycle;
          pending.anchor_id = -1;
          pending.fault = false;
          pending.detail = expr_to_string(prop_.expr);
          pending.span = prop_.expr->span;
        }
      }
      if (violated) {
        res.stop = StopKind::Violated;
        res.violation = pending;
        res.end_values = persistent_valuation(store);
        return true;
      }
      res.successors.push_back(store.persistent_values());
      return false;
    } catch (const EvalFault& f) {
      if (violated) {
        // the violating run faulted while completing; keep the violation
        res.stop = StopKind::Violated;
        res.violation = pending;
      } else {
        res.stop = StopKind::Fault;
        res.violation.fault = true;
        res.violation.detail = f.what();
        res.violation.span = f.span;
        res.violation.location_id = loc;
        res.violation.anchor_id = -1;
      }
      res.end_values = persistent_valuation(store);
      return true;
    }
  }

  bool fork(const Transition& t, const Store& base, uint64_t& steps,
            bool violated, const Violation& pending, CycleResult& res) {
    // enumerate the cartesian product of nondet assign domains, ascending;
    // non-nondet assignments apply in their listed positions
    std::vector<size_t> nd_pos;
    std::vector<Domain> nd_dom;
    for (size_t i = 0; i < t.assigns.size(); ++i) {
      const Assignment& as = t.assigns[i];
      if (as.value->kind != Expr::Kind::Nondet) continue;
      nd_pos.push_back(i);
      if (as.value->domain)
        nd_dom.push_back(Domain{0, 0, as.value->domain});
      else
        nd_dom.push_back(full_domain(as.value->type));
    }
    uint64_t total = 1;
    for (const Domain& d : nd_dom) {
      uint64_t s = d.size();
      if (s == 0 || total > cfg_.max_states / s) {
        // degenerate or oversized product: cap the exploration
        res.stop = StopKind::StepCap;
        return true;
      }
      total *= s;
    }
    for (uint64_t idx = 0; idx < total; ++idx) {
      Store s = base;
      uint64_t rest = idx;
      std::vector<int32_t> chosen(nd_dom.size());
      for (size_t i = nd_dom.size(); i-- > 0;) {
        uint64_t sz = nd_dom[i].size();
        chosen[i] = domain_value_at(nd_dom[i], rest % sz);
        rest /= sz;
      }
      try {
        size_t next_nd = 0;
        for (size_t i = 0; i < t.assigns.size(); ++i) {
          const Assignment& as = t.assigns[i];
          if (as.value->kind == Expr::Kind::Nondet) {
            if (as.index)
              s.array_set(as.var, eval_expr(*as.index, s), chosen[next_nd],
                          as.span);
            else
              s.set(as.var, chosen[next_nd]);
            ++next_nd;
          } else {
            apply_assignment(as, s);
          }
        }
      } catch (const EvalFault& f) {
        res.stop = StopKind::Fault;
        res.violation.fault = true;
        res.violation.detail = f.what();
        res.violation.span = f.span;
        res.end_values = persistent_valuation(s);
        return true;
      }
      if (walk(t.target, std::move(s), steps, violated, pending, res))
        return true;
    }
    return false;
  }

  // --- cycle-level BFS -------------------------------------------------------

  // One (state, input-combination) run. True means exploration must stop.
  bool run_one_cycle(const std::vector<int32_t>& pvals,
                     const std::vector<std::pair<Symbol, int32_t>>& combo,
                     CycleResult& res) {
    Store store = make_cycle_store(pvals);
    try {
      apply_havoc(store, combo);
    } catch (const EvalFault& f) {
      res.stop = StopKind::Fault;
      res.violation.fault = true;
      res.violation.detail = f.what();
      res.violation.span = f.span;
      res.end_values = persistent_valuation(store);
      return true;
    }
    uint64_t steps = 0;
    return walk(body_entry_, std::move(store), steps, false, Violation{}, res);
  }

  Trace build_trace(const std::vector<StateRec>& states, int parent_sid,
                    int cycle,
                    const std::vector<std::pair<Symbol, int32_t>>& last_inputs,
                    const CycleResult& res) const {
    Trace tr;
    tr.violation = res.violation;
    tr.violation.cycle = cycle;
    // reconstruct cycles 1..cycle-1 from the parent chain
    std::vector<int> chain;
    for (int sid = parent_sid; sid > 0; sid = states[static_cast<size_t>(sid)].parent)
      chain.push_back(sid);
    tr.cycles.resize(static_cast<size_t>(cycle));
    for (size_t i = 0; i < chain.size(); ++i) {
      const StateRec& rec = states[static_cast<size_t>(chain[chain.size() - 1 - i])];
      tr.cycles[i].inputs = rec.inputs;
      tr.cycles[i].end_values = render_persistent(layout_, rec.pvals);
    }
    tr.cycles.back().inputs = last_inputs;
    tr.cycles.back().end_values = res.end_values;
    return tr;
  }

  Verdict explore() {
    Verdict out;
    out.stats.branching_factor = branching_factor();

    std::vector<StateRec> states;
    std::unordered_map<std::vector<int32_t>, int, ValuationHash> visited;

    Store init(layout_);
    StateRec root;
    root.pvals = init.persistent_values();
    visited.emplace(root.pvals, 0);
    states.push_back(std::move(root));
    out.stats.states_explored = 1;

    std::vector<int> frontier{0};
    uint64_t combos = out.stats.branching_factor;

    for (int cycle = 1; cycle <= cfg_.K; ++cycle) {
      out.stats.peak_frontier =
          std::max<uint64_t>(out.stats.peak_frontier, frontier.size());
      std::vector<int> next;
      for (int sid : frontier) {
        for (uint64_t ci = 0; ci < std::max<uint64_t>(combos, 1); ++ci) {
          std::vector<std::pair<Symbol, int32_t>> combo = combo_values(ci);
          CycleResult res;
          bool stop =
              run_one_cycle(states[static_cast<size_t>(sid)].pvals, combo, res);
          if (stop) {
            switch (res.stop) {
              case StopKind::Violated:
                out.kind = VerdictKind::Violated;
                out.trace = build_trace(states, sid, cycle, combo, res);
                return out;
              case StopKind::Fault:
                out.kind = VerdictKind::Fault;
                out.trace = build_trace(states, sid, cycle, combo, res);
                out.trace->violation.fault = true;
                return out;
              case StopKind::StepCap:
                out.kind = VerdictKind::BoundReached;
                out.stats.step_cap_hit = true;
                out.note = "per-cycle step limit exceeded";
                return out;
              case StopKind::None:
                break;
            }
          }
          for (std::vector<int32_t>& succ : res.successors) {
            auto [it, fresh] =
                visited.emplace(succ, static_cast<int>(states.size()));
            if (!fresh) continue;
            StateRec rec;
            rec.pvals = std::move(succ);
            rec.parent = sid;
            rec.inputs = combo;
            next.push_back(it->second);
            states.push_back(std::move(rec));
            ++out.stats.states_explored;
            if (out.stats.states_explored > cfg_.max_states) {
              out.kind = VerdictKind::BoundReached;
              out.stats.state_cap_hit = true;
              out.stats.cycles_completed = cycle - 1;
              out.note = "state cap exceeded";
              return out;
            }
          }
        }
      }
      out.stats.cycles_completed = cycle;
      frontier = std::move(next);
      if (frontier.empty()) {
        out.kind = VerdictKind::Satisfied;
        return out;
      }
    }
    out.kind = VerdictKind::BoundReached;
    return out;
  }

  const CfaNetwork& net_;
  const Property& prop_;
  EngineConfig cfg_;
  Layout layout_;
  Adjacency adj_;
  std::vector<const Variable*> inputs_;
  int body_entry_ = -1;
};

}  // namespace detail

inline Verdict check(const VerificationProblem& p,
                     const EngineConfig& cfg = {}) {
  if (cfg.K < 1) throw std::invalid_argument("engine bound K must be >= 1");
  detail::Checker c(p, cfg);
  return c.run();
}

}  // namespace stverif
