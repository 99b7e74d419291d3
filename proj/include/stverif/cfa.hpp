#pragma once
// Control-flow-automata intermediate model with PLC scan-cycle structure.
// Immutable after construction; checker runs may share a network freely.
#include <cstdint>
#include <string>
#include <vector>

#include "stverif/ast.hpp"
#include "stverif/printing.hpp"

namespace stverif {

// Havoc domain of a variable. Explicit values take priority over the
// [lo, hi] range; reductions may shrink either form.
struct Domain {
  int32_t lo = 0;
  int32_t hi = 0;
  std::optional<std::vector<int32_t>> values;

  uint64_t size() const {
    if (values) return values->size();
    return static_cast<uint64_t>(static_cast<int64_t>(hi) -
                                 static_cast<int64_t>(lo) + 1);
  }

  bool operator==(const Domain&) const = default;
};

inline Domain full_domain(Scalar s) {
  return Domain{scalar_min(s), scalar_max(s), std::nullopt};
}

struct Variable {
  Symbol name;
  ElementaryType type;
  VarKind kind;
  std::optional<int32_t> init;  // constants always carry one
  Domain domain;                // input havoc range; full type range otherwise
  Span span;

  bool persistent() const {
    return kind != VarKind::Temp;
  }
};

enum class LocRole : uint8_t {
  Initial,
  CycleStart,
  EndOfCycle,
  AssertionAnchor,
  Plain,
};

inline const char* loc_role_name(LocRole r) {
  switch (r) {
    case LocRole::Initial: return "initial";
    case LocRole::CycleStart: return "cycle-start";
    case LocRole::EndOfCycle: return "end-of-cycle";
    case LocRole::AssertionAnchor: return "assertion-anchor";
    case LocRole::Plain: return "plain";
  }
  return "?";
}

struct Location {
  int id = -1;
  LocRole role = LocRole::Plain;
  // assertion-anchor payload
  ExprPtr assertion;
  int anchor_id = -1;
  std::string anchor_name;
};

// One assignment inside a transition. Null index means scalar target.
struct Assignment {
  Symbol var;
  ExprPtr index;
  ExprPtr value;
  Span span;
};

// Call-site payload referenced by a transition (resolved during inlining
// or abstraction; the engine itself never sees one).
struct CallSite {
  Symbol callee;
  std::vector<std::pair<Symbol, ExprPtr>> in_binds;
  std::vector<std::pair<Symbol, LValue>> out_binds;
  Span span;
};

struct Transition {
  int source = -1;
  int target = -1;
  ExprPtr guard;  // null means TRUE
  std::vector<Assignment> assigns;
  bool havoc = false;     // the one cycle-start input havoc
  int call_index = -1;    // >= 0: index into Automaton::call_sites
};

struct Automaton {
  Symbol name;
  std::vector<Location> locations;
  std::vector<Transition> transitions;
  std::vector<CallSite> call_sites;
  // distinguished locations; callees use initial/exit only
  int initial = -1;
  int cycle_start = -1;
  int end_of_cycle = -1;
  int exit = -1;

  int add_location(LocRole role) {
    Location l;
    l.id = static_cast<int>(locations.size());
    l.role = role;
    locations.push_back(l);
    return l.id;
  }

  const Location& loc(int id) const { return locations[static_cast<size_t>(id)]; }
  Location& loc(int id) { return locations[static_cast<size_t>(id)]; }

  bool has_call_sites() const {
    for (const Transition& t : transitions)
      if (t.call_index >= 0) return true;
    return false;
  }
};

struct CfaNetwork {
  std::vector<Variable> variables;  // entry unit's variables plus inlined ones
  Automaton main;
  std::vector<Automaton> callees;      // bodies in entry/exit form
  std::vector<std::vector<Variable>> callee_vars;  // parallel to callees
  Symbol entry_name;
  TypedAstPtr ast;  // retained for the oracle and source-level reporting

  const Variable* find_variable(Symbol name) const {
    for (const Variable& v : variables)
      if (v.name == name) return &v;
    return nullptr;
  }

  const Automaton* find_callee(Symbol name) const {
    for (const Automaton& a : callees)
      if (a.name == name) return &a;
    return nullptr;
  }

  int callee_index(Symbol name) const {
    for (size_t i = 0; i < callees.size(); ++i)
      if (callees[i].name == name) return static_cast<int>(i);
    return -1;
  }

  std::vector<const Variable*> inputs() const {
    std::vector<const Variable*> out;
    for (const Variable& v : variables)
      if (v.kind == VarKind::Input) out.push_back(&v);
    return out;
  }
};

// --- deterministic debug dump (golden-file friendly) -----------------------

namespace detail {

inline std::string domain_text(const Domain& d) {
  if (d.values) {
    std::string s = "{";
    for (size_t i = 0; i < d.values->size(); ++i) {
      if (i) s += ",";
      s += std::to_string((*d.values)[i]);
    }
    return s + "}";
  }
  return "[" + std::to_string(d.lo) + "," + std::to_string(d.hi) + "]";
}

inline void dump_automaton(const Automaton& a, std::string& out) {
  out += "automaton " + std::string(a.name.str()) + "\n";
  for (const Location& l : a.locations) {
    out += "  loc " + std::to_string(l.id) + " " + loc_role_name(l.role);
    if (l.role == LocRole::AssertionAnchor) {
      out += " #" + std::to_string(l.anchor_id);
      if (!l.anchor_name.empty()) out += " name=" + l.anchor_name;
      out += " assert=" + expr_to_string(l.assertion);
    }
    out += "\n";
  }
  for (const Transition& t : a.transitions) {
    out += "  trans " + std::to_string(t.source) + " -> " +
           std::to_string(t.target);
    out += " guard=" + (t.guard ? expr_to_string(t.guard) : "TRUE");
    if (t.havoc) out += " havoc";
    if (t.call_index >= 0) {
      const CallSite& cs = a.call_sites[static_cast<size_t>(t.call_index)];
      out += " call=" + std::string(cs.callee.str());
    }
    for (const Assignment& as : t.assigns) {
      out += " | " + std::string(as.var.str());
      if (as.index) out += "[" + expr_to_string(as.index) + "]";
      out += " := " + expr_to_string(as.value);
    }
    out += "\n";
  }
}

}  // namespace detail

inline std::string dump_cfa(const CfaNetwork& net) {
  std::string out = "network entry=" + std::string(net.entry_name.str()) + "\n";
  for (const Variable& v : net.variables) {
    out += "var " + std::string(v.name.str()) + ": " + v.type.to_string() +
           " kind=" + var_kind_name(v.kind);
    if (v.init) out += " init=" + std::to_string(*v.init);
    if (v.kind == VarKind::Input) out += " domain=" + detail::domain_text(v.domain);
    out += "\n";
  }
  detail::dump_automaton(net.main, out);
  for (size_t i = 0; i < net.callees.size(); ++i) {
    for (const Variable& v : net.callee_vars[i])
      out += "var " + std::string(net.callees[i].name.str()) + "." +
             std::string(v.name.str()) + ": " + v.type.to_string() +
             " kind=" + var_kind_name(v.kind) + "\n";
    detail::dump_automaton(net.callees[i], out);
  }
  return out;
}

}  // namespace stverif
