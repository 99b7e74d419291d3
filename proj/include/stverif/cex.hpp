#pragma once
// Counterexample handling: deterministic replay of per-cycle input
// valuations, spuriousness validation against a concrete network,
// simulator-input export with round-trip parsing, and fault localization
// by dynamic backward slicing.
//
// Replay mirrors the engine's walk exactly (anchor check order, pending
// violations surviving completion faults, end valuations at the fault
// point), so an engine-produced trace replays to an identical Trace.
#include <algorithm>
#include <charconv>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "stverif/printing.hpp"
#include "stverif/requirements.hpp"
#include "stverif/trace.hpp"

namespace stverif {

// Input valuation for one scan cycle, in declaration order.
using CycleInputs = std::vector<std::pair<Symbol, int32_t>>;

struct ValidationResult {
  bool feasible = false;
  int divergent_cycle = -1;        // 1-based, spurious results only
  std::string divergent_variable;  // flattened name; may be empty
  std::string note;
};

struct LocalizedStatement {
  enum class Kind { Assignment, Guard };
  Kind kind = Kind::Assignment;
  Span span;
  std::string subject;  // assigned variable, or guard expression text
  double score = 0.0;
};

struct LocalizationReport {
  std::vector<LocalizedStatement> entries;  // scores non-increasing
};

namespace cex_detail {

struct NullLog {
  void begin_cycle(int) {}
  void havoc_def(int, Symbol, Span) {}
  void reset_def(int, const Assignment&) {}
  void guard_taken(int, int, int, const ExprPtr&) {}
  void assign(int, int, const Assignment&) {}
  void violation_seed(int, int, const ExprPtr&) {}
};

inline void expr_vars(const ExprPtr& e, std::set<Symbol>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::VarRef || e->kind == Expr::Kind::ArrayRead)
    out.insert(e->var);
  expr_vars(e->index, out);
  expr_vars(e->a, out);
  expr_vars(e->b, out);
}

// Per-cycle valuation maps, checked to cover exactly the input variables.
inline std::vector<std::unordered_map<Symbol, int32_t, SymbolHash>>
checked_input_maps(const CfaNetwork& net,
                   const std::vector<CycleInputs>& inputs) {
  std::vector<const Variable*> invars = net.inputs();
  std::vector<std::unordered_map<Symbol, int32_t, SymbolHash>> maps;
  maps.reserve(inputs.size());
  for (size_t k = 0; k < inputs.size(); ++k) {
    std::unordered_map<Symbol, int32_t, SymbolHash> m;
    for (const auto& [name, value] : inputs[k]) {
      bool known = false;
      for (const Variable* v : invars) known = known || v->name == name;
      if (!known)
        throw std::invalid_argument("cycle " + std::to_string(k + 1) + ": '" +
                                    std::string(name.str()) +
                                    "' is not an input variable");
      if (!m.emplace(name, value).second)
        throw std::invalid_argument("cycle " + std::to_string(k + 1) +
                                    ": duplicate value for input '" +
                                    std::string(name.str()) + "'");
    }
    for (const Variable* v : invars)
      if (!m.count(v->name))
        throw std::invalid_argument("cycle " + std::to_string(k + 1) +
                                    ": missing value for input '" +
                                    std::string(v->name.str()) + "'");
    maps.push_back(std::move(m));
  }
  return maps;
}

// Deterministic interpretation of the given input sequence. With a
// property, only its designated check runs (matching anchor, or the
// expression at end-of-cycle); without one, every anchor assertion is
// checked. Stops after the cycle that first violates or faults.
template <class Log>
Trace replay_core(const CfaNetwork& net, const std::vector<CycleInputs>& inputs,
                  const Property* prop, uint64_t max_steps, Log&& log) {
  if (inputs.empty())
    throw std::invalid_argument("replay needs at least one cycle of inputs");
  if (net.main.has_call_sites())
    throw std::invalid_argument("replay requires an inlined network");
  auto maps = checked_input_maps(net, inputs);

  const Automaton& a = net.main;
  Layout layout(net.variables);
  Store store(layout);
  Adjacency adj(a);

  const Transition* havoc = nullptr;
  for (const Transition& t : a.transitions)
    if (t.havoc) havoc = &t;
  if (!havoc) throw std::invalid_argument("network has no havoc transition");

  Trace tr;
  for (size_t k = 0; k < inputs.size(); ++k) {
    int cycle = static_cast<int>(k) + 1;
    log.begin_cycle(cycle);
    CycleRecord rec;
    bool violated = false;
    Violation pending;
    int loc = -1;
    try {
      for (const Assignment& as : havoc->assigns) {
        if (as.value->kind == Expr::Kind::Nondet) {
          store.set(as.var, maps[k].at(as.var));
          log.havoc_def(cycle, as.var, as.span);
        } else {
          apply_assignment(as, store);
          log.reset_def(cycle, as);
        }
      }
      for (const Variable* v : net.inputs())
        rec.inputs.emplace_back(v->name, store.get(v->name));

      loc = havoc->target;
      uint64_t steps = 0;
      while (true) {
        const Location& l = a.loc(loc);
        if (l.role == LocRole::AssertionAnchor && !violated &&
            (!prop || (prop->at == Property::At::Anchor &&
                       l.anchor_id == prop->anchor_id))) {
          if (eval_expr(*l.assertion, store) == 0) {
            violated = true;
            pending.location_id = l.id;
            pending.anchor_id = l.anchor_id;
            pending.fault = false;
            pending.detail = expr_to_string(l.assertion);
            pending.span = l.assertion->span;
            log.violation_seed(cycle, loc, l.assertion);
          }
        }
        if (loc == a.end_of_cycle) break;

        const Transition* taken = nullptr;
        for (int ti : adj.outgoing(loc)) {
          const Transition& t = a.transitions[static_cast<size_t>(ti)];
          if (t.havoc) continue;
          if (eval_guard(t.guard, store)) {
            taken = &t;
            break;
          }
        }
        if (!taken)
          throw std::logic_error("no enabled transition at location " +
                                 std::to_string(loc));
        if (++steps > max_steps)
          throw std::logic_error("replay exceeded the per-cycle step limit");
        if (taken->guard) log.guard_taken(cycle, loc, taken->target, taken->guard);
        for (const Assignment& as : taken->assigns) {
          apply_assignment(as, store);
          log.assign(cycle, loc, as);
        }
        loc = taken->target;
      }

      if (!violated && prop && prop->at == Property::At::EndOfCycle) {
        if (eval_expr(*prop->expr, store) == 0) {
          violated = true;
          pending.location_id = a.end_of_cycle;
          pending.anchor_id = -1;
          pending.fault = false;
          pending.detail = expr_to_string(prop->expr);
          pending.span = prop->expr->span;
          log.violation_seed(cycle, a.end_of_cycle, prop->expr);
        }
      }
      rec.end_values = persistent_valuation(store);
      tr.cycles.push_back(std::move(rec));
      if (violated) {
        tr.violation = pending;
        tr.violation.cycle = cycle;
        return tr;
      }
    } catch (const EvalFault& f) {
      if (violated) {
        // the violating cycle faulted while completing; keep the violation
        tr.violation = pending;
      } else {
        tr.violation.fault = true;
        tr.violation.detail = f.what();
        tr.violation.span = f.span;
        tr.violation.location_id = loc;
        tr.violation.anchor_id = -1;
      }
      tr.violation.cycle = cycle;
      rec.end_values = persistent_valuation(store);
      tr.cycles.push_back(std::move(rec));
      return tr;
    }
  }
  return tr;  // violation.cycle stays -1: the bounded run was clean
}

}  // namespace cex_detail

// Replay checking every anchor assertion in the network.
inline Trace replay(const CfaNetwork& net, const std::vector<CycleInputs>& inputs,
                    uint64_t max_steps_per_cycle = 1'000'000) {
  return cex_detail::replay_core(net, inputs, nullptr, max_steps_per_cycle,
                                 cex_detail::NullLog{});
}

// Replay checking exactly the problem's property, like the engine does.
inline Trace replay(const VerificationProblem& p,
                    const std::vector<CycleInputs>& inputs,
                    uint64_t max_steps_per_cycle = 1'000'000) {
  return cex_detail::replay_core(p.net, inputs, &p.property,
                                 max_steps_per_cycle, cex_detail::NullLog{});
}

// Replays the trace's inputs on the problem's (concrete) network. Feasible
// iff the claimed violation reproduces at the same cycle with the same
// kind; otherwise reports the first end-of-cycle divergence.
inline ValidationResult validate(const VerificationProblem& p, const Trace& t) {
  if (t.violation.cycle < 1)
    throw std::invalid_argument("validate needs a trace with a violation");
  if (static_cast<size_t>(t.violation.cycle) > t.cycles.size())
    throw std::invalid_argument(
        "trace violation cycle exceeds its recorded cycles");

  std::vector<CycleInputs> ins;
  for (int k = 0; k < t.violation.cycle; ++k)
    ins.push_back(t.cycles[static_cast<size_t>(k)].inputs);
  Trace r = replay(p, ins);

  ValidationResult out;
  if (r.violation.cycle == t.violation.cycle &&
      r.violation.fault == t.violation.fault &&
      r.violation.anchor_id == t.violation.anchor_id) {
    out.feasible = true;
    return out;
  }

  size_t upto = std::min(r.cycles.size(), t.cycles.size());
  for (size_t k = 0; k < upto; ++k) {
    std::unordered_map<std::string, int32_t> got;
    for (const auto& [name, value] : r.cycles[k].end_values)
      got.emplace(name, value);
    for (const auto& [name, want] : t.cycles[k].end_values) {
      auto it = got.find(name);
      if (it != got.end() && it->second != want) {
        out.divergent_cycle = static_cast<int>(k) + 1;
        out.divergent_variable = name;
        out.note = "replay yields " + name + " = " +
                   std::to_string(it->second) + ", trace claims " +
                   std::to_string(want);
        return out;
      }
    }
  }
  out.divergent_cycle = t.violation.cycle;
  out.note = "violation did not reproduce on the concrete network";
  return out;
}

// Semicolon-separated input file: header "cycle;<name>...", one row per
// cycle. BOOL renders TRUE/FALSE, numerics as decimal, so values read back
// with ST literal syntax.
inline std::string emit_simulator_inputs(const Trace& t,
                                         const CfaNetwork& net) {
  if (t.cycles.empty())
    throw std::invalid_argument("cannot emit inputs for an empty trace");
  std::string out = "cycle";
  for (const auto& [name, value] : t.cycles.front().inputs)
    out += ";" + std::string(name.str());
  out += "\n";
  for (size_t k = 0; k < t.cycles.size(); ++k) {
    out += std::to_string(k + 1);
    for (const auto& [name, value] : t.cycles[k].inputs) {
      const Variable* v = net.find_variable(name);
      out += ";";
      if (v && v->type.base == Scalar::Bool)
        out += value ? "TRUE" : "FALSE";
      else
        out += std::to_string(value);
    }
    out += "\n";
  }
  return out;
}

inline std::vector<CycleInputs> parse_simulator_inputs(
    const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  if (lines.empty())
    throw std::invalid_argument("simulator input text is empty");

  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::string f;
    for (char c : line) {
      if (c == ';') {
        fields.push_back(f);
        f.clear();
      } else {
        f += c;
      }
    }
    fields.push_back(f);
    return fields;
  };

  std::vector<std::string> header = split(lines.front());
  if (header.empty() || header.front() != "cycle")
    throw std::invalid_argument("simulator input header must start with 'cycle'");
  std::vector<Symbol> names;
  for (size_t i = 1; i < header.size(); ++i) {
    if (header[i].empty())
      throw std::invalid_argument("simulator input header has an empty name");
    names.push_back(Symbol::intern(header[i]));
  }

  std::vector<CycleInputs> out;
  for (size_t row = 1; row < lines.size(); ++row) {
    std::vector<std::string> fields = split(lines[row]);
    if (fields.size() != names.size() + 1)
      throw std::invalid_argument("simulator input row " + std::to_string(row) +
                                  " has " + std::to_string(fields.size()) +
                                  " fields, expected " +
                                  std::to_string(names.size() + 1));
    if (fields.front() != std::to_string(row))
      throw std::invalid_argument("simulator input row " + std::to_string(row) +
                                  " is numbered '" + fields.front() + "'");
    CycleInputs ci;
    for (size_t i = 0; i < names.size(); ++i) {
      const std::string& f = fields[i + 1];
      int32_t value = 0;
      if (f == "TRUE") {
        value = 1;
      } else if (f == "FALSE") {
        value = 0;
      } else {
        int64_t v = 0;
        auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc{} || ptr != f.data() + f.size() ||
            v < INT32_MIN || v > INT32_MAX)
          throw std::invalid_argument("simulator input row " +
                                      std::to_string(row) +
                                      " has a malformed value '" + f + "'");
        value = static_cast<int32_t>(v);
      }
      ci.emplace_back(names[i], value);
    }
    out.push_back(std::move(ci));
  }
  if (out.empty())
    throw std::invalid_argument("simulator input text has no cycles");
  return out;
}

namespace cex_detail {

// Execution log for dynamic slicing: definitions, taken guards, and the
// violation point, in execution order.
struct SliceLog {
  struct Event {
    enum class Kind { Havoc, Reset, Assign, Guard };
    Kind kind;
    int cycle = 0;
    int source_loc = -1;  // assign/guard: location the transition leaves
    int target_loc = -1;  // guard only
    Symbol var;           // defined variable for havoc/reset/assign
    std::set<Symbol> reads;
    Span span;
    std::string text;  // guard expression text
  };

  std::vector<Event> events;
  int violation_cycle = -1;
  int violation_seq = -1;  // events with index < this precede the violation
  int violation_loc = -1;
  std::set<Symbol> seed_reads;

  void begin_cycle(int) {}
  void havoc_def(int cycle, Symbol var, Span sp) {
    events.push_back(Event{Event::Kind::Havoc, cycle, -1, -1, var, {}, sp, {}});
  }
  void reset_def(int cycle, const Assignment& as) {
    events.push_back(
        Event{Event::Kind::Reset, cycle, -1, -1, as.var, {}, as.span, {}});
  }
  void guard_taken(int cycle, int loc, int target, const ExprPtr& g) {
    Event e{Event::Kind::Guard, cycle, loc, target, Symbol{}, {}, g->span,
            expr_to_string(g)};
    expr_vars(g, e.reads);
    events.push_back(std::move(e));
  }
  void assign(int cycle, int loc, const Assignment& as) {
    Event e{Event::Kind::Assign, cycle, loc,   -1,
            as.var,             {},    as.span, {}};
    expr_vars(as.value, e.reads);
    expr_vars(as.index, e.reads);
    events.push_back(std::move(e));
  }
  void violation_seed(int cycle, int loc, const ExprPtr& expr) {
    violation_cycle = cycle;
    violation_seq = static_cast<int>(events.size());
    violation_loc = loc;
    expr_vars(expr, seed_reads);
  }
};

// pd[v] = the set of locations post-dominating v within one scan cycle
// (the back transition out of end-of-cycle is excluded).
inline std::vector<std::set<int>> post_dominators(const Automaton& a) {
  size_t n = a.locations.size();
  std::vector<std::vector<int>> succ(n);
  for (const Transition& t : a.transitions) {
    if (t.source == a.end_of_cycle) continue;
    succ[static_cast<size_t>(t.source)].push_back(t.target);
  }
  std::set<int> all;
  for (size_t i = 0; i < n; ++i) all.insert(static_cast<int>(i));
  std::vector<std::set<int>> pd(n, all);
  pd[static_cast<size_t>(a.end_of_cycle)] = {a.end_of_cycle};
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t v = 0; v < n; ++v) {
      if (static_cast<int>(v) == a.end_of_cycle || succ[v].empty()) continue;
      std::set<int> acc = pd[static_cast<size_t>(succ[v].front())];
      for (size_t si = 1; si < succ[v].size(); ++si) {
        std::set<int> inter;
        const std::set<int>& other = pd[static_cast<size_t>(succ[v][si])];
        std::set_intersection(acc.begin(), acc.end(), other.begin(),
                              other.end(),
                              std::inserter(inter, inter.begin()));
        acc = std::move(inter);
      }
      acc.insert(static_cast<int>(v));
      if (acc != pd[v]) {
        pd[v] = std::move(acc);
        changed = true;
      }
    }
  }
  return pd;
}

}  // namespace cex_detail

// Dynamic backward slice of the violated property over the replayed
// execution. Score = 1 / (1 + dependence distance from the property).
// Assignments reach back through their reads (data) and the taken guards
// that control their location (control); guards chain likewise.
inline LocalizationReport localize(const VerificationProblem& p,
                                   const Trace& t) {
  if (t.violation.fault)
    throw std::invalid_argument(
        "localization requires a property violation, not a fault");
  ValidationResult vr = validate(p, t);
  if (!vr.feasible)
    throw std::invalid_argument(
        "localization requires a feasible violation trace");

  std::vector<CycleInputs> ins;
  for (int k = 0; k < t.violation.cycle; ++k)
    ins.push_back(t.cycles[static_cast<size_t>(k)].inputs);
  cex_detail::SliceLog log;
  cex_detail::replay_core(p.net, ins, &p.property, 1'000'000, log);
  if (log.violation_seq < 0)
    throw std::logic_error("feasible trace failed to reproduce during slicing");

  using Event = cex_detail::SliceLog::Event;
  const std::vector<Event>& ev = log.events;
  std::vector<std::set<int>> pd = cex_detail::post_dominators(p.net.main);
  auto postdom = [&](int node, int of) {
    return pd[static_cast<size_t>(of)].count(node) != 0;
  };

  // latest definition of var strictly before event index `before`
  auto last_def = [&](Symbol var, int before) -> int {
    for (int i = before - 1; i >= 0; --i) {
      const Event& e = ev[static_cast<size_t>(i)];
      if (e.kind != Event::Kind::Guard && e.var == var) return i;
    }
    return -1;
  };
  // taken guards controlling location `loc` at event index `at` (same
  // cycle, latest instance per branch location)
  auto controlling_guards = [&](int loc, int at, int cycle) {
    std::vector<int> out;
    std::set<int> seen_branches;
    for (int i = at - 1; i >= 0; --i) {
      const Event& e = ev[static_cast<size_t>(i)];
      if (e.cycle != cycle) break;
      if (e.kind != Event::Kind::Guard) continue;
      if (seen_branches.count(e.source_loc)) continue;
      bool controls = (loc == e.target_loc || postdom(loc, e.target_loc)) &&
                      !postdom(loc, e.source_loc);
      if (controls) {
        seen_branches.insert(e.source_loc);
        out.push_back(i);
      }
    }
    return out;
  };

  struct Entry {
    LocalizedStatement stmt;
    int first_index;  // tie-break for equal scores
  };
  std::map<std::tuple<int, int32_t, uint32_t, uint32_t, std::string>, Entry>
      entries;
  auto record = [&](const Event& e, int index, int dist) {
    LocalizedStatement st;
    if (e.kind == Event::Kind::Assign) {
      if (e.var.str().front() == '#') return;  // synthetic loop temp
      st.kind = LocalizedStatement::Kind::Assignment;
      st.subject = std::string(e.var.str());
    } else {
      st.kind = LocalizedStatement::Kind::Guard;
      st.subject = e.text;
    }
    st.span = e.span;
    st.score = 1.0 / (1.0 + dist);
    auto key = std::make_tuple(static_cast<int>(st.kind), e.span.file,
                               e.span.lo, e.span.hi, st.subject);
    auto it = entries.find(key);
    if (it == entries.end()) {
      entries.emplace(key, Entry{st, index});
    } else if (st.score > it->second.stmt.score) {
      it->second.stmt.score = st.score;
      it->second.first_index = index;
    }
  };

  // breadth-first over dependence edges; distances grow by one per edge
  std::vector<int> best_dist(ev.size(), INT32_MAX);
  std::deque<std::pair<int, int>> work;  // event index, distance
  auto push = [&](int index, int dist) {
    if (index < 0) return;
    const Event& e = ev[static_cast<size_t>(index)];
    if (e.kind == Event::Kind::Havoc || e.kind == Event::Kind::Reset)
      return;  // inputs and temp resets end a chain silently
    if (dist >= best_dist[static_cast<size_t>(index)]) return;
    best_dist[static_cast<size_t>(index)] = dist;
    record(e, index, dist);
    work.emplace_back(index, dist);
  };

  for (Symbol var : log.seed_reads)
    push(last_def(var, log.violation_seq), 1);
  for (int gi : controlling_guards(log.violation_loc, log.violation_seq,
                                   log.violation_cycle))
    push(gi, 1);

  while (!work.empty()) {
    auto [index, dist] = work.front();
    work.pop_front();
    if (dist > best_dist[static_cast<size_t>(index)]) continue;
    const Event& e = ev[static_cast<size_t>(index)];
    for (Symbol var : e.reads) push(last_def(var, index), dist + 1);
    if (e.source_loc >= 0)
      for (int gi : controlling_guards(e.source_loc, index, e.cycle))
        push(gi, dist + 1);
  }

  LocalizationReport report;
  std::vector<Entry> sorted;
  for (auto& [key, entry] : entries) sorted.push_back(entry);
  std::sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) {
    if (a.stmt.score != b.stmt.score) return a.stmt.score > b.stmt.score;
    return a.first_index < b.first_index;
  });
  for (Entry& e : sorted) report.entries.push_back(std::move(e.stmt));
  return report;
}

}  // namespace stverif
