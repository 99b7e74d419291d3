#pragma once
// External checker backends: NuSMV and CBMC model emission, subprocess
// execution with a wall-clock timeout, and output parsing back into
// verdicts and traces. Emission is byte-deterministic so golden files and
// repeated runs stay stable. Both emitters require an inlined network.
#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "stverif/engine.hpp"
#include "stverif/printing.hpp"
#include "stverif/requirements.hpp"
#include "stverif/trace.hpp"

namespace stverif {

// A construct the target format cannot express, e.g. a dynamically indexed
// array in the NuSMV encoding. The span names the offending source bytes.
struct UnsupportedFeature : std::runtime_error {
  Span span;
  UnsupportedFeature(const std::string& msg, Span sp)
      : std::runtime_error(msg + " at bytes " + std::to_string(sp.lo) + ".." +
                           std::to_string(sp.hi) + " of source unit " +
                           std::to_string(sp.file)),
        span(sp) {}
};

// Bijection between model names (variables and array elements) and
// identifiers legal in the emitted format. Reserved words and generated
// helper names are blocked up front; collisions get numeric suffixes.
class NameMap {
 public:
  void reserve(const std::string& ident) { used_.insert(ident); }

  std::string add(const std::string& source) {
    auto it = fwd_.find(source);
    if (it != fwd_.end()) return it->second;
    std::string base;
    for (char c : source)
      base += (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
                  ? c
                  : '_';
    if (base.empty() || std::isdigit(static_cast<unsigned char>(base[0])))
      base = "v" + base;
    std::string pick = base;
    for (int n = 2; used_.count(pick); ++n)
      pick = base + "_" + std::to_string(n);
    used_.insert(pick);
    fwd_[source] = pick;
    rev_[pick] = source;
    return pick;
  }

  const std::string* emitted(const std::string& source) const {
    auto it = fwd_.find(source);
    return it == fwd_.end() ? nullptr : &it->second;
  }

  const std::string* source_of(const std::string& emitted) const {
    auto it = rev_.find(emitted);
    return it == rev_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, std::string>& forward() const { return fwd_; }
  const std::map<std::string, std::string>& reverse() const { return rev_; }

 private:
  std::map<std::string, std::string> fwd_;
  std::map<std::string, std::string> rev_;
  std::set<std::string> used_;
};

// A finished model text plus everything needed to interpret checker output
// without the originating network.
struct EmittedModel {
  std::string format;  // "smv" or "c"
  std::string text;
  NameMap map;
  std::string property_label;
  std::string property_text;                  // source form of the property
  std::vector<std::string> input_names;       // declaration order
  std::vector<std::string> persistent_names;  // declaration order, flattened
  std::map<std::string, int32_t> array_lo;    // emitted array name -> low index
  std::map<int, std::string> anchor_exprs;    // anchor id -> source assertion
};

struct ToolConfig {
  std::string path;  // executable name or path; empty picks the default
  double timeout_s = 60.0;
  std::vector<std::string> extra_args;
};

struct ToolRun {
  std::vector<std::string> command;
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
  double seconds = 0.0;
  bool timed_out = false;
};

namespace backend_detail {

inline int word_width(Scalar s) { return s == Scalar::Int ? 16 : 32; }

inline const char* c_type_name(Scalar s) {
  switch (s) {
    case Scalar::Bool: return "_Bool";
    case Scalar::Int: return "stv_int16";
    case Scalar::Dint: return "stv_int32";
  }
  return "?";
}

inline const char* nondet_fn_name(Scalar s) {
  switch (s) {
    case Scalar::Bool: return "nondet_bool";
    case Scalar::Int: return "nondet_int16";
    case Scalar::Dint: return "nondet_int32";
  }
  return "?";
}

inline const std::vector<std::string>& smv_reserved() {
  static const std::vector<std::string> kw = {
      "MODULE",   "DEFINE",  "MDEFINE", "CONSTANTS", "VAR",     "IVAR",
      "FROZENVAR", "INIT",   "TRANS",   "INVAR",     "SPEC",    "CTLSPEC",
      "LTLSPEC",  "PSLSPEC", "COMPUTE", "INVARSPEC", "FAIRNESS", "JUSTICE",
      "COMPASSION", "ISA",   "ASSIGN",  "CONSTRAINT", "IN",     "MIN",
      "MAX",      "MIRROR",  "PRED",    "PREDICATES", "process", "array",
      "of",       "boolean", "integer", "real",      "word",    "word1",
      "bool",     "signed",  "unsigned", "extend",   "resize",  "sizeof",
      "uwconst",  "swconst", "EX",      "AX",        "EF",      "AF",
      "EG",       "AG",      "E",       "F",         "O",       "G",
      "H",        "X",       "Y",       "Z",         "A",       "U",
      "S",        "V",       "T",       "BU",        "EBF",     "ABF",
      "EBG",      "ABG",     "case",    "esac",      "mod",     "next",
      "init",     "union",   "in",      "xor",       "xnor",    "self",
      "TRUE",     "FALSE",   "count",   "abs",       "max",     "min"};
  return kw;
}

inline const std::vector<std::string>& c_reserved() {
  static const std::vector<std::string> kw = {
      "auto",     "break",   "case",     "char",    "const",    "continue",
      "default",  "do",      "double",   "else",    "enum",     "extern",
      "float",    "for",     "goto",     "if",      "inline",   "int",
      "long",     "register", "restrict", "return",  "short",    "signed",
      "sizeof",   "static",  "struct",   "switch",  "typedef",  "union",
      "unsigned", "void",    "volatile", "while",   "_Bool",    "_Complex",
      "_Imaginary", "main",  "stv_int16", "stv_int32", "stv_cycle",
      "scan_cycle", "nondet_bool", "nondet_int16", "nondet_int32",
      "__CPROVER_assert", "__CPROVER_assume"};
  return kw;
}

// Two's complement bit pattern as a signed hex word constant; exact for
// every representable value including the type minimum.
inline std::string smv_word(Scalar t, int32_t v) {
  int w = word_width(t);
  uint32_t bits = static_cast<uint32_t>(v);
  if (w == 16) bits &= 0xffffu;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%0*x", w / 4, bits);
  return "0sh" + std::to_string(w) + "_" + buf;
}

inline std::string c_int(int32_t v) {
  if (v == INT32_MIN) return "(-2147483647 - 1)";
  return std::to_string(v);
}

// Flattened name of a scalar variable or one array element.
inline std::string elem_name(Symbol var, std::optional<int32_t> idx) {
  std::string s(var.str());
  if (idx) s += "[" + std::to_string(*idx) + "]";
  return s;
}

inline std::string loc_literal(const Location& l) {
  std::string s = "L" + std::to_string(l.id);
  switch (l.role) {
    case LocRole::Initial: return s + "_init";
    case LocRole::CycleStart: return s + "_cyc";
    case LocRole::EndOfCycle: return s + "_end";
    case LocRole::AssertionAnchor:
      return s + "_a" + std::to_string(l.anchor_id);
    case LocRole::Plain: return s;
  }
  return s;
}

struct LocRef {
  int id = -1;
  int anchor = -1;
  bool end = false;
};

inline std::optional<LocRef> parse_loc_literal(const std::string& s) {
  if (s.empty() || s[0] != 'L') return std::nullopt;
  size_t i = 1;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == 1) return std::nullopt;
  LocRef r;
  r.id = std::stoi(s.substr(1, i - 1));
  std::string suffix = s.substr(i);
  if (suffix == "_end") r.end = true;
  else if (suffix.rfind("_a", 0) == 0) r.anchor = std::stoi(suffix.substr(2));
  return r;
}

// --- expression rendering ---------------------------------------------------

// Substitution environment for sequential-to-parallel conversion: flattened
// element name -> already rendered replacement text.
using SubstEnv = std::map<std::string, std::string>;

inline std::string smv_expr(const ExprPtr& e, const NameMap& map,
                            const SubstEnv* env);

inline std::string smv_operand(const ExprPtr& o, int width, const NameMap& map,
                               const SubstEnv* env) {
  std::string s = smv_expr(o, map, env);
  if (o->type != Scalar::Bool && word_width(o->type) < width)
    return "resize(" + s + ", " + std::to_string(width) + ")";
  return s;
}

inline std::string smv_lookup(const std::string& key, const NameMap& map,
                              const SubstEnv* env) {
  if (env) {
    auto it = env->find(key);
    if (it != env->end()) return it->second;
  }
  const std::string* n = map.emitted(key);
  if (!n) throw std::logic_error("unmapped variable " + key);
  return *n;
}

inline std::string smv_expr(const ExprPtr& e, const NameMap& map,
                            const SubstEnv* env) {
  switch (e->kind) {
    case Expr::Kind::Literal:
      if (e->type == Scalar::Bool) return e->value ? "TRUE" : "FALSE";
      return smv_word(e->type, e->value);
    case Expr::Kind::VarRef:
      return smv_lookup(elem_name(e->var, std::nullopt), map, env);
    case Expr::Kind::ArrayRead:
      return smv_lookup(elem_name(e->var, e->index->value), map, env);
    case Expr::Kind::Unary: {
      std::string a = smv_expr(e->a, map, env);
      return e->un == UnOp::Not ? "(!" + a + ")" : "(- " + a + ")";
    }
    case Expr::Kind::Binary: {
      const char* op = nullptr;
      switch (e->bin) {
        case BinOp::And: op = "&"; break;
        case BinOp::Or: op = "|"; break;
        case BinOp::Xor: op = "xor"; break;
        case BinOp::Eq: op = "="; break;
        case BinOp::Ne: op = "!="; break;
        case BinOp::Lt: op = "<"; break;
        case BinOp::Le: op = "<="; break;
        case BinOp::Gt: op = ">"; break;
        case BinOp::Ge: op = ">="; break;
        case BinOp::Add: op = "+"; break;
        case BinOp::Sub: op = "-"; break;
        case BinOp::Mul: op = "*"; break;
        case BinOp::Div: op = "/"; break;
        case BinOp::Mod: op = "mod"; break;
      }
      bool arith = e->bin == BinOp::Add || e->bin == BinOp::Sub ||
                   e->bin == BinOp::Mul || e->bin == BinOp::Div ||
                   e->bin == BinOp::Mod;
      bool compare = e->bin == BinOp::Eq || e->bin == BinOp::Ne ||
                     e->bin == BinOp::Lt || e->bin == BinOp::Le ||
                     e->bin == BinOp::Gt || e->bin == BinOp::Ge;
      if (arith) {
        int w = word_width(e->type);
        return "(" + smv_operand(e->a, w, map, env) + " " + op + " " +
               smv_operand(e->b, w, map, env) + ")";
      }
      if (compare && e->a->type != Scalar::Bool) {
        int w = std::max(word_width(e->a->type), word_width(e->b->type));
        return "(" + smv_operand(e->a, w, map, env) + " " + op + " " +
               smv_operand(e->b, w, map, env) + ")";
      }
      return "(" + smv_expr(e->a, map, env) + " " + op + " " +
             smv_expr(e->b, map, env) + ")";
    }
    case Expr::Kind::Nondet:
      throw std::logic_error("nondet outside an assignment right-hand side");
  }
  throw std::logic_error("unhandled expression kind");
}

// The NuSMV encoding flattens arrays, so every index must be a literal
// inside the declared range.
inline void check_smv_expr(const ExprPtr& e, const CfaNetwork& net) {
  if (!e) return;
  if (e->kind == Expr::Kind::ArrayRead) {
    if (e->index->kind != Expr::Kind::Literal)
      throw UnsupportedFeature("dynamic array index is outside the smv subset",
                               e->span);
    const Variable* v = net.find_variable(e->var);
    if (v && (e->index->value < v->type.lo || e->index->value > v->type.hi))
      throw UnsupportedFeature("array index outside the declared range",
                               e->span);
  }
  check_smv_expr(e->index, net);
  check_smv_expr(e->a, net);
  check_smv_expr(e->b, net);
}

inline void check_smv_subset(const CfaNetwork& net, const Property& prop) {
  for (const Transition& t : net.main.transitions) {
    check_smv_expr(t.guard, net);
    for (const Assignment& as : t.assigns) {
      if (as.index) {
        if (as.index->kind != Expr::Kind::Literal)
          throw UnsupportedFeature(
              "dynamic array index is outside the smv subset", as.span);
        const Variable* v = net.find_variable(as.var);
        if (v &&
            (as.index->value < v->type.lo || as.index->value > v->type.hi))
          throw UnsupportedFeature("array index outside the declared range",
                                   as.span);
      }
      if (as.value->kind != Expr::Kind::Nondet) check_smv_expr(as.value, net);
    }
  }
  for (const Location& l : net.main.locations)
    if (l.role == LocRole::AssertionAnchor) check_smv_expr(l.assertion, net);
  check_smv_expr(prop.expr, net);
}

// Domain constraint for one nondet choice, rendered against `name`.
// Returns empty when the domain covers the full type range.
inline std::string smv_domain_constraint(const std::string& name, Scalar t,
                                         const Domain& d) {
  if (d.values) {
    std::string out;
    for (int32_t v : *d.values) {
      std::string lit = t == Scalar::Bool ? (v ? "TRUE" : "FALSE")
                                          : smv_word(t, v);
      out += (out.empty() ? "" : " | ") + ("(" + name + " = " + lit + ")");
    }
    return out.empty() ? "FALSE" : "(" + out + ")";
  }
  if (d.lo <= scalar_min(t) && d.hi >= scalar_max(t)) return "";
  if (t == Scalar::Bool) {
    if (d.lo == d.hi)
      return "(" + name + " = " + (d.lo ? "TRUE" : "FALSE") + ")";
    return "";
  }
  return "((" + name + " >= " + smv_word(t, d.lo) + ") & (" + name +
         " <= " + smv_word(t, d.hi) + "))";
}

// The havoc transition draws from the variable's declared domain; body
// nondet assignments carry an optional explicit value set of their own.
inline Domain nondet_domain(const CfaNetwork& net, const Transition& t,
                            const Assignment& as) {
  if (t.havoc) {
    const Variable* v = net.find_variable(as.var);
    if (v) return v->domain;
  }
  if (as.value->domain) {
    Domain d;
    d.values = as.value->domain;
    return d;
  }
  return full_domain(as.value->type);
}

}  // namespace backend_detail

// --- NuSMV emission ----------------------------------------------------------

// One module, one enumerated location variable, and one next() relation per
// state variable. Inputs are latched from free choice variables on the havoc
// transition so they stay stable across a scan cycle. The property becomes an
// INVARSPEC guarded to its anchor locations (or to the end-of-cycle location).
inline EmittedModel emit_smv(const VerificationProblem& p) {
  namespace bd = backend_detail;
  const CfaNetwork& net = p.net;
  const Automaton& a = net.main;
  if (a.has_call_sites())
    throw std::invalid_argument("emit_smv requires an inlined network");
  bd::check_smv_subset(net, p.property);

  EmittedModel m;
  m.format = "smv";
  m.property_label = p.property.label;
  m.property_text = expr_to_string(p.property.expr);

  for (const std::string& kw : bd::smv_reserved()) m.map.reserve(kw);
  m.map.reserve("loc");
  for (size_t i = 0; i < a.transitions.size(); ++i)
    m.map.reserve("t_" + std::to_string(i));
  for (const Location& l : a.locations) m.map.reserve(bd::loc_literal(l));

  // choice variables, one per nondet assignment occurrence
  struct Choice {
    std::string name;
    Scalar type = Scalar::Bool;
    std::string constraint;
  };
  std::map<std::pair<size_t, size_t>, size_t> choice_of;  // (trans, assign)
  std::vector<Choice> choices;
  for (size_t ti = 0; ti < a.transitions.size(); ++ti) {
    const Transition& t = a.transitions[ti];
    for (size_t ai = 0; ai < t.assigns.size(); ++ai) {
      const Assignment& as = t.assigns[ai];
      if (as.value->kind != Expr::Kind::Nondet) continue;
      Choice c;
      c.name = "nd_" + std::to_string(choices.size());
      c.type = as.value->type;
      c.constraint = bd::smv_domain_constraint(
          c.name, c.type, bd::nondet_domain(net, t, as));
      m.map.reserve(c.name);
      choice_of[{ti, ai}] = choices.size();
      choices.push_back(std::move(c));
    }
  }

  // flattened state elements in declaration order
  struct Elem {
    std::string source;
    std::string emitted;
    Scalar base = Scalar::Bool;
    int32_t init = 0;
  };
  std::vector<Elem> elems;
  for (const Variable& v : net.variables) {
    auto push = [&](std::optional<int32_t> idx) {
      Elem e;
      e.source = bd::elem_name(v.name, idx);
      e.emitted = m.map.add(e.source);
      e.base = v.type.base;
      e.init = v.init.value_or(0);
      elems.push_back(std::move(e));
    };
    if (!v.type.array) {
      push(std::nullopt);
    } else {
      for (int64_t i = v.type.lo; i <= v.type.hi; ++i)
        push(static_cast<int32_t>(i));
    }
    if (v.kind == VarKind::Input)
      m.input_names.push_back(std::string(v.name.str()));
    if (v.kind != VarKind::Temp) {
      if (!v.type.array) {
        m.persistent_names.push_back(std::string(v.name.str()));
      } else {
        for (int64_t i = v.type.lo; i <= v.type.hi; ++i)
          m.persistent_names.push_back(std::string(v.name.str()) + "[" +
                                       std::to_string(i) + "]");
      }
    }
  }

  // per-transition parallel effect: flattened element -> final rendered text,
  // with earlier writes of the same transition substituted into later reads
  std::vector<std::map<std::string, std::string>> finals(a.transitions.size());
  for (size_t ti = 0; ti < a.transitions.size(); ++ti) {
    const Transition& t = a.transitions[ti];
    bd::SubstEnv env;
    for (size_t ai = 0; ai < t.assigns.size(); ++ai) {
      const Assignment& as = t.assigns[ai];
      std::string rhs;
      Scalar rhs_type;
      if (as.value->kind == Expr::Kind::Nondet) {
        rhs = choices[choice_of[{ti, ai}]].name;
        rhs_type = as.value->type;
      } else {
        rhs = bd::smv_expr(as.value, m.map, &env);
        rhs_type = as.value->type;
      }
      const Variable* v = net.find_variable(as.var);
      if (v && v->type.base != Scalar::Bool && rhs_type != Scalar::Bool &&
          bd::word_width(rhs_type) < bd::word_width(v->type.base))
        rhs = "resize(" + rhs + ", " +
              std::to_string(bd::word_width(v->type.base)) + ")";
      std::string key = bd::elem_name(
          as.var, as.index ? std::optional<int32_t>(as.index->value)
                           : std::nullopt);
      env[key] = rhs;
      finals[ti][key] = rhs;
    }
  }

  std::string out;
  out += "-- " + std::string(net.entry_name.str()) +
         " as a scan-cycle transition system, one step per edge\n";
  out += "-- property: " + m.property_label + "\n";
  out += "MODULE main\n";
  out += "VAR\n";
  out += "  loc : {";
  for (size_t i = 0; i < a.locations.size(); ++i)
    out += (i ? ", " : "") + bd::loc_literal(a.locations[i]);
  out += "};\n";
  for (const Elem& e : elems) {
    out += "  " + e.emitted + " : ";
    out += e.base == Scalar::Bool
               ? "boolean"
               : "signed word[" +
                     std::to_string(bd::word_width(e.base)) + "]";
    out += ";";
    if (e.emitted != e.source) out += "  -- " + e.source;
    out += "\n";
  }
  if (!choices.empty()) {
    out += "IVAR\n";
    for (const auto& c : choices) {
      out += "  " + c.name + " : ";
      out += c.type == Scalar::Bool
                 ? "boolean"
                 : "signed word[" +
                       std::to_string(bd::word_width(c.type)) + "]";
      out += ";\n";
    }
  }

  // taken_i: transition i fires, honoring sibling priority at its source
  out += "DEFINE\n";
  for (size_t ti = 0; ti < a.transitions.size(); ++ti) {
    const Transition& t = a.transitions[ti];
    std::string cond =
        "(loc = " + bd::loc_literal(a.loc(t.source)) + ")";
    bool dead = false;
    for (size_t sj = 0; sj < ti; ++sj) {
      const Transition& s = a.transitions[sj];
      if (s.source != t.source) continue;
      if (!s.guard) {
        dead = true;  // an earlier unconditional sibling always wins
        break;
      }
      cond += " & (!" + bd::smv_expr(s.guard, m.map, nullptr) + ")";
    }
    if (t.guard) cond += " & " + bd::smv_expr(t.guard, m.map, nullptr);
    out += "  t_" + std::to_string(ti) + " := " +
           (dead ? std::string("FALSE") : cond) + ";\n";
  }

  out += "ASSIGN\n";
  out += "  init(loc) := " + bd::loc_literal(a.loc(a.initial)) + ";\n";
  out += "  next(loc) := case\n";
  for (size_t ti = 0; ti < a.transitions.size(); ++ti)
    out += "    t_" + std::to_string(ti) + " : " +
           bd::loc_literal(a.loc(a.transitions[ti].target)) + ";\n";
  out += "    TRUE : loc;\n";
  out += "  esac;\n";
  for (const Elem& e : elems) {
    std::string init = e.base == Scalar::Bool
                           ? (e.init ? "TRUE" : "FALSE")
                           : bd::smv_word(e.base, e.init);
    out += "  init(" + e.emitted + ") := " + init + ";\n";
    std::vector<std::pair<size_t, std::string>> arms;
    for (size_t ti = 0; ti < a.transitions.size(); ++ti) {
      auto it = finals[ti].find(e.source);
      if (it != finals[ti].end()) arms.emplace_back(ti, it->second);
    }
    if (arms.empty()) {
      out += "  next(" + e.emitted + ") := " + e.emitted + ";\n";
      continue;
    }
    out += "  next(" + e.emitted + ") := case\n";
    for (const auto& [ti, rhs] : arms)
      out += "    t_" + std::to_string(ti) + " : " + rhs + ";\n";
    out += "    TRUE : " + e.emitted + ";\n";
    out += "  esac;\n";
  }

  for (const auto& c : choices)
    if (!c.constraint.empty()) out += "TRANS " + c.constraint + ";\n";

  // the property holds exactly at its designated locations
  std::string spec;
  if (p.property.at == Property::At::EndOfCycle) {
    spec = "((loc = " + bd::loc_literal(a.loc(a.end_of_cycle)) + ") -> " +
           bd::smv_expr(p.property.expr, m.map, nullptr) + ")";
  } else {
    for (const Location& l : a.locations) {
      if (l.role != LocRole::AssertionAnchor ||
          l.anchor_id != p.property.anchor_id)
        continue;
      if (!m.anchor_exprs.count(l.anchor_id))
        m.anchor_exprs[l.anchor_id] = expr_to_string(l.assertion);
      std::string one = "((loc = " + bd::loc_literal(l) + ") -> " +
                        bd::smv_expr(l.assertion, m.map, nullptr) + ")";
      spec += (spec.empty() ? "" : " & ") + one;
    }
    if (spec.empty()) spec = "TRUE";
  }
  out += "INVARSPEC " + spec + ";\n";

  m.text = std::move(out);
  return m;
}

// --- C emission ---------------------------------------------------------------

namespace backend_detail {

// Body control flow of the main automaton, excluding the scan back edge.
// Dominators classify back edges, natural loops become while statements,
// and immediate post-dominators over the back-edge-free graph give the
// join point of every branch.
struct BodyGraph {
  const Automaton* a = nullptr;
  int n = 0;
  int sink = 0;  // virtual node past end-of-cycle and every back edge
  std::vector<std::vector<int>> out;  // transition ids by source
  std::vector<char> reach;
  std::set<int> back;  // back-edge transition ids

  struct LoopInfo {
    std::set<int> nodes;
    int exit = -1;
  };
  std::map<int, LoopInfo> loops;
  std::vector<int> ipd;
};

inline BodyGraph build_body_graph(const Automaton& a) {
  BodyGraph g;
  g.a = &a;
  g.n = static_cast<int>(a.locations.size());
  g.sink = g.n;
  g.out.assign(static_cast<size_t>(g.n), {});
  for (size_t ti = 0; ti < a.transitions.size(); ++ti) {
    const Transition& t = a.transitions[ti];
    if (t.source == a.end_of_cycle) continue;
    g.out[static_cast<size_t>(t.source)].push_back(static_cast<int>(ti));
  }

  g.reach.assign(static_cast<size_t>(g.n), 0);
  std::vector<int> work = {a.cycle_start};
  g.reach[static_cast<size_t>(a.cycle_start)] = 1;
  while (!work.empty()) {
    int v = work.back();
    work.pop_back();
    for (int ti : g.out[static_cast<size_t>(v)]) {
      int w = a.transitions[static_cast<size_t>(ti)].target;
      if (!g.reach[static_cast<size_t>(w)]) {
        g.reach[static_cast<size_t>(w)] = 1;
        work.push_back(w);
      }
    }
  }

  std::vector<std::vector<int>> preds(static_cast<size_t>(g.n));
  for (int v = 0; v < g.n; ++v) {
    if (!g.reach[static_cast<size_t>(v)]) continue;
    for (int ti : g.out[static_cast<size_t>(v)])
      preds[static_cast<size_t>(a.transitions[static_cast<size_t>(ti)].target)]
          .push_back(v);
  }

  // forward dominators of the body, iterated to a fixed point
  std::set<int> all;
  for (int v = 0; v < g.n; ++v)
    if (g.reach[static_cast<size_t>(v)]) all.insert(v);
  std::vector<std::set<int>> dom(static_cast<size_t>(g.n), all);
  dom[static_cast<size_t>(a.cycle_start)] = {a.cycle_start};
  for (bool changed = true; changed;) {
    changed = false;
    for (int v : all) {
      if (v == a.cycle_start) continue;
      std::set<int> nd = all;
      bool first = true;
      for (int p : preds[static_cast<size_t>(v)]) {
        if (first) {
          nd = dom[static_cast<size_t>(p)];
          first = false;
        } else {
          std::set<int> inter;
          for (int x : nd)
            if (dom[static_cast<size_t>(p)].count(x)) inter.insert(x);
          nd = std::move(inter);
        }
      }
      nd.insert(v);
      if (nd != dom[static_cast<size_t>(v)]) {
        dom[static_cast<size_t>(v)] = std::move(nd);
        changed = true;
      }
    }
  }

  for (size_t ti = 0; ti < a.transitions.size(); ++ti) {
    const Transition& t = a.transitions[ti];
    if (t.source == a.end_of_cycle) continue;
    if (!g.reach[static_cast<size_t>(t.source)]) continue;
    if (dom[static_cast<size_t>(t.source)].count(t.target))
      g.back.insert(static_cast<int>(ti));
  }

  for (int ti : g.back) {
    const Transition& t = a.transitions[static_cast<size_t>(ti)];
    BodyGraph::LoopInfo& L = g.loops[t.target];
    L.nodes.insert(t.target);
    std::vector<int> wl;
    if (t.source != t.target && L.nodes.insert(t.source).second)
      wl.push_back(t.source);
    while (!wl.empty()) {
      int v = wl.back();
      wl.pop_back();
      for (int pv : preds[static_cast<size_t>(v)])
        if (L.nodes.insert(pv).second) wl.push_back(pv);
    }
  }

  // post-dominators over the acyclic graph: back edges flow to the sink
  std::vector<std::set<int>> pd(static_cast<size_t>(g.n) + 1, all);
  for (auto& s : pd) s.insert(g.sink);
  pd[static_cast<size_t>(g.sink)] = {g.sink};
  for (bool changed = true; changed;) {
    changed = false;
    for (int v : all) {
      std::set<int> np;
      bool first = true;
      auto meet = [&](int w) {
        if (first) {
          np = pd[static_cast<size_t>(w)];
          first = false;
        } else {
          std::set<int> inter;
          for (int x : np)
            if (pd[static_cast<size_t>(w)].count(x)) inter.insert(x);
          np = std::move(inter);
        }
      };
      bool any = false;
      for (int ti : g.out[static_cast<size_t>(v)]) {
        any = true;
        meet(g.back.count(ti)
                 ? g.sink
                 : a.transitions[static_cast<size_t>(ti)].target);
      }
      if (!any) meet(g.sink);
      np.insert(v);
      if (np != pd[static_cast<size_t>(v)]) {
        pd[static_cast<size_t>(v)] = std::move(np);
        changed = true;
      }
    }
  }
  g.ipd.assign(static_cast<size_t>(g.n) + 1, g.sink);
  for (int v : all) {
    const std::set<int>& s = pd[static_cast<size_t>(v)];
    for (int w : s) {
      if (w == v) continue;
      if (pd[static_cast<size_t>(w)].size() == s.size() - 1) {
        g.ipd[static_cast<size_t>(v)] = w;
        break;
      }
    }
  }

  // A loop's exit is where its escape paths converge: the nearest common
  // post-dominator of every non-back edge target outside the loop. Escape
  // chains (an EXIT arm's private locations) emit inside the loop body and
  // break on reaching the exit; jumps to end-of-cycle return instead and
  // are not exits.
  auto meet = [&g](int x, int y) {
    std::set<int> cx;
    for (int v = x;; v = g.ipd[static_cast<size_t>(v)]) {
      cx.insert(v);
      if (v == g.sink) break;
    }
    int v = y;
    while (!cx.count(v)) v = g.ipd[static_cast<size_t>(v)];
    return v;
  };
  for (auto& [h, L] : g.loops) {
    int exit = -1;
    for (int v : L.nodes) {
      for (int ti : g.out[static_cast<size_t>(v)]) {
        if (g.back.count(ti)) continue;
        int w = a.transitions[static_cast<size_t>(ti)].target;
        if (L.nodes.count(w) || w == a.end_of_cycle) continue;
        exit = exit < 0 ? w : meet(exit, w);
      }
    }
    L.exit = exit == g.sink ? -1 : exit;
  }
  return g;
}

inline std::string c_expr(const ExprPtr& e, const NameMap& map,
                          const CfaNetwork& net);

inline std::string c_array_ref(Symbol var, const ExprPtr& index,
                               const NameMap& map, const CfaNetwork& net) {
  const Variable* v = net.find_variable(var);
  int32_t lo = v ? v->type.lo : 0;
  std::string idx = c_expr(index, map, net);
  std::string off =
      lo == 0 ? idx : "(" + idx + ") - (" + std::to_string(lo) + ")";
  const std::string* n = map.emitted(std::string(var.str()));
  if (!n) throw std::logic_error("unmapped array " + std::string(var.str()));
  return *n + "[" + off + "]";
}

inline std::string c_cast(Scalar t) {
  return std::string("(") + c_type_name(t) + ")";
}

inline std::string c_expr(const ExprPtr& e, const NameMap& map,
                          const CfaNetwork& net) {
  switch (e->kind) {
    case Expr::Kind::Literal:
      if (e->type == Scalar::Bool) return e->value ? "1" : "0";
      return c_int(e->value);
    case Expr::Kind::VarRef: {
      const std::string* n = map.emitted(std::string(e->var.str()));
      if (!n)
        throw std::logic_error("unmapped variable " +
                               std::string(e->var.str()));
      return *n;
    }
    case Expr::Kind::ArrayRead:
      return c_array_ref(e->var, e->index, map, net);
    case Expr::Kind::Unary: {
      std::string a = c_expr(e->a, map, net);
      if (e->un == UnOp::Not) return "(!" + a + ")";
      // negation wraps at the operand width like every arithmetic node
      return "(" + c_cast(e->type) + "(-" + a + "))";
    }
    case Expr::Kind::Binary: {
      std::string a = c_expr(e->a, map, net);
      std::string b = c_expr(e->b, map, net);
      switch (e->bin) {
        case BinOp::And: return "(" + a + " && " + b + ")";
        case BinOp::Or: return "(" + a + " || " + b + ")";
        case BinOp::Xor: return "(" + a + " != " + b + ")";
        case BinOp::Eq: return "(" + a + " == " + b + ")";
        case BinOp::Ne: return "(" + a + " != " + b + ")";
        case BinOp::Lt: return "(" + a + " < " + b + ")";
        case BinOp::Le: return "(" + a + " <= " + b + ")";
        case BinOp::Gt: return "(" + a + " > " + b + ")";
        case BinOp::Ge: return "(" + a + " >= " + b + ")";
        case BinOp::Add:
          return "(" + c_cast(e->type) + "(" + a + " + " + b + "))";
        case BinOp::Sub:
          return "(" + c_cast(e->type) + "(" + a + " - " + b + "))";
        case BinOp::Mul:
          return "(" + c_cast(e->type) + "(" + a + " * " + b + "))";
        case BinOp::Div:
          return "(" + c_cast(e->type) + "(" + a + " / " + b + "))";
        case BinOp::Mod:
          return "(" + c_cast(e->type) + "(" + a + " % " + b + "))";
      }
      throw std::logic_error("unhandled binary operator");
    }
    case Expr::Kind::Nondet:
      throw std::logic_error("nondet outside an assignment right-hand side");
  }
  throw std::logic_error("unhandled expression kind");
}

inline std::string c_string_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

inline std::string c_domain_assume(const std::string& target, Scalar t,
                                   const Domain& d) {
  if (d.values) {
    std::string out;
    for (int32_t v : *d.values) {
      std::string lit = t == Scalar::Bool ? (v ? "1" : "0") : c_int(v);
      out += (out.empty() ? "" : " || ") +
             ("(" + target + " == " + lit + ")");
    }
    return out.empty() ? "0" : out;
  }
  if (d.lo <= scalar_min(t) && d.hi >= scalar_max(t)) return "";
  if (t == Scalar::Bool) {
    if (d.lo == d.hi) return "(" + target + " == " + (d.lo ? "1" : "0") + ")";
    return "";
  }
  return "(" + target + " >= " + c_int(d.lo) + ") && (" + target +
         " <= " + c_int(d.hi) + ")";
}

// Structured statement emission: straight lines become statement sequences,
// branch joins come from immediate post-dominators, natural loops become
// while (1) bodies with break and continue, and a jump to end-of-cycle is a
// return from scan_cycle. No goto is ever produced.
class CEmitter {
 public:
  CEmitter(const VerificationProblem& p, EmittedModel& m)
      : p_(p), net_(p.net), a_(p.net.main), m_(m),
        g_(build_body_graph(p.net.main)) {}

  std::string scan_body() {
    out_.clear();
    indent_ = 1;
    emit_region(a_.cycle_start, a_.end_of_cycle, -1);
    return out_;
  }

  // assignments on the path from the initial location to the cycle start
  std::string init_lines() {
    out_.clear();
    indent_ = 1;
    int cur = a_.initial;
    std::set<int> seen;
    while (cur != a_.cycle_start) {
      if (!seen.insert(cur).second)
        throw std::logic_error("initialization path is cyclic");
      const Transition* next = nullptr;
      for (const Transition& t : a_.transitions)
        if (t.source == cur) {
          next = &t;
          break;
        }
      if (!next || next->guard)
        throw std::logic_error("initialization path must be unconditional");
      emit_assigns(*next);
      cur = next->target;
    }
    return out_;
  }

 private:
  struct Ctx {
    int header;
    int exit;
    const std::set<int>* nodes;
  };

  void line(const std::string& s) {
    out_.append(static_cast<size_t>(indent_) * 2, ' ');
    out_ += s;
    out_ += '\n';
  }

  void emit_region(int entry, int stop, int suppress) {
    int cur = entry;
    while (cur >= 0 && cur != stop) {
      if (cur == a_.end_of_cycle) return;
      auto lit = g_.loops.find(cur);
      if (lit != g_.loops.end() && cur != suppress) {
        line("while (1) {");
        ++indent_;
        ctx_.push_back({cur, lit->second.exit, &lit->second.nodes});
        emit_region(cur, -1, cur);
        ctx_.pop_back();
        --indent_;
        line("}");
        if (lit->second.exit < 0) return;
        cur = lit->second.exit;
        suppress = -1;
        continue;
      }
      suppress = -1;
      const Location& l = a_.loc(cur);
      if (l.role == LocRole::AssertionAnchor) emit_anchor(l);
      const std::vector<int>& outs = g_.out[static_cast<size_t>(cur)];
      if (outs.empty()) return;
      const Transition& t0 = a_.transitions[static_cast<size_t>(outs[0])];
      if (outs.size() == 1 && !t0.guard) {
        cur = apply_transition(t0, stop);
        continue;
      }
      int join = g_.ipd[static_cast<size_t>(cur)];
      int arm_stop = join == g_.sink ? -1 : join;
      bool closed = false;
      for (size_t k = 0; k < outs.size(); ++k) {
        const Transition& t = a_.transitions[static_cast<size_t>(outs[k])];
        if (k == 0) {
          line("if (" + c_expr(t.guard, m_.map, net_) + ") {");
        } else if (t.guard) {
          line("} else if (" + c_expr(t.guard, m_.map, net_) + ") {");
        } else {
          line("} else {");
          closed = true;
        }
        ++indent_;
        int nt = apply_transition(t, arm_stop);
        if (nt >= 0) emit_region(nt, arm_stop, -1);
        --indent_;
        if (closed) break;  // later siblings are unreachable
      }
      line("}");
      if (arm_stop < 0) return;
      cur = arm_stop;
    }
  }

  // Emits the transition's assignments, then classifies the target:
  // end-of-cycle returns from the scan function, the innermost loop's
  // header and exit become continue and break, the arm stop ends the
  // region, and anything else continues emission at the target.
  int apply_transition(const Transition& t, int arm_stop) {
    emit_assigns(t);
    if (t.target == a_.end_of_cycle) {
      line("return;");
      return -1;
    }
    if (!ctx_.empty()) {
      const Ctx& c = ctx_.back();
      if (t.target == c.header) {
        line("continue;");
        return -1;
      }
      if (t.target == c.exit) {
        line("break;");
        return -1;
      }
    }
    if (t.target == arm_stop) return -1;
    return t.target;
  }

  void emit_assigns(const Transition& t) {
    for (const Assignment& as : t.assigns) {
      std::string target =
          as.index ? c_array_ref(as.var, as.index, m_.map, net_)
                   : *m_.map.emitted(std::string(as.var.str()));
      if (as.value->kind == Expr::Kind::Nondet) {
        line(target + " = " +
             std::string(nondet_fn_name(as.value->type)) + "();");
        std::string c = c_domain_assume(target, as.value->type,
                                        nondet_domain(net_, t, as));
        if (!c.empty()) line("__CPROVER_assume(" + c + ");");
      } else {
        line(target + " = " + c_expr(as.value, m_.map, net_) + ";");
      }
    }
  }

  void emit_anchor(const Location& l) {
    if (p_.property.at != Property::At::Anchor ||
        l.anchor_id != p_.property.anchor_id)
      return;
    std::string text = expr_to_string(l.assertion);
    if (!m_.anchor_exprs.count(l.anchor_id))
      m_.anchor_exprs[l.anchor_id] = text;
    std::string label = "stv: anchor=" + std::to_string(l.anchor_id) +
                        " loc=" + std::to_string(l.id) + " expr=" + text;
    line("__CPROVER_assert(" + c_expr(l.assertion, m_.map, net_) + ", \"" +
         c_string_escape(label) + "\");");
  }

  const VerificationProblem& p_;
  const CfaNetwork& net_;
  const Automaton& a_;
  EmittedModel& m_;
  BodyGraph g_;
  std::vector<Ctx> ctx_;
  std::string out_;
  int indent_ = 1;
};

}  // namespace backend_detail

// Structured C with one scan_cycle function called from an infinite loop.
// Inputs come from declared nondet extern functions named by type, loops stay
// loops, and anchors become assertion calls whose label carries the anchor
// id, location, and source expression for trace mapping.
inline EmittedModel emit_c(const VerificationProblem& p) {
  namespace bd = backend_detail;
  const CfaNetwork& net = p.net;
  const Automaton& a = net.main;
  if (a.has_call_sites())
    throw std::invalid_argument("emit_c requires an inlined network");

  EmittedModel m;
  m.format = "c";
  m.property_label = p.property.label;
  m.property_text = expr_to_string(p.property.expr);
  for (const std::string& kw : bd::c_reserved()) m.map.reserve(kw);

  for (const Variable& v : net.variables) {
    std::string emitted = m.map.add(std::string(v.name.str()));
    if (v.type.array) m.array_lo[emitted] = v.type.lo;
    if (v.kind == VarKind::Input)
      m.input_names.push_back(std::string(v.name.str()));
    if (v.kind != VarKind::Temp) {
      if (!v.type.array) {
        m.persistent_names.push_back(std::string(v.name.str()));
      } else {
        for (int64_t i = v.type.lo; i <= v.type.hi; ++i)
          m.persistent_names.push_back(std::string(v.name.str()) + "[" +
                                       std::to_string(i) + "]");
      }
    }
  }

  bd::CEmitter emitter(p, m);
  std::string body = emitter.scan_body();
  std::string init = emitter.init_lines();

  std::string out;
  out += "/* " + std::string(net.entry_name.str()) +
         " as structured C, one scan cycle per scan_cycle() call */\n";
  out += "/* property: " + m.property_label + " */\n\n";
  out += "typedef signed short stv_int16;\n";
  out += "typedef signed int stv_int32;\n\n";
  out += "extern _Bool nondet_bool(void);\n";
  out += "extern stv_int16 nondet_int16(void);\n";
  out += "extern stv_int32 nondet_int32(void);\n";
  out += "extern void __CPROVER_assert(_Bool assertion, "
         "const char *description);\n";
  out += "extern void __CPROVER_assume(_Bool assumption);\n\n";

  for (const Variable& v : net.variables) {
    const std::string& name = *m.map.emitted(std::string(v.name.str()));
    int32_t init_v = v.init.value_or(0);
    if (!v.type.array) {
      std::string rhs = v.type.base == Scalar::Bool
                            ? (init_v ? "1" : "0")
                            : bd::c_int(init_v);
      out += "static " + std::string(bd::c_type_name(v.type.base)) + " " +
             name + " = " + rhs + ";";
      if (name != std::string(v.name.str()))
        out += "  /* " + std::string(v.name.str()) + " */";
      out += "\n";
    } else {
      int64_t count = static_cast<int64_t>(v.type.hi) - v.type.lo + 1;
      out += "static " + std::string(bd::c_type_name(v.type.base)) + " " +
             name + "[" + std::to_string(count) + "] = {";
      for (int64_t i = 0; i < count; ++i)
        out += (i ? ", " : "") + bd::c_int(init_v);
      out += "};  /* " + std::string(v.name.str()) + "[" +
             std::to_string(v.type.lo) + ".." + std::to_string(v.type.hi) +
             "] */\n";
    }
  }
  out += "static unsigned int stv_cycle = 0u;\n\n";

  out += "static void scan_cycle(void)\n{\n" + body + "}\n\n";

  out += "int main(void)\n{\n";
  out += init;
  out += "  while (1) {\n";
  out += "    scan_cycle();\n";
  if (p.property.at == Property::At::EndOfCycle) {
    std::string label = "stv: end-of-cycle loc=" +
                        std::to_string(a.end_of_cycle) +
                        " expr=" + m.property_text;
    out += "    __CPROVER_assert(" +
           bd::c_expr(p.property.expr, m.map, net) + ", \"" +
           bd::c_string_escape(label) + "\");\n";
  }
  out += "    stv_cycle = stv_cycle + 1u;\n";
  out += "  }\n";
  out += "  return 0;\n";
  out += "}\n";

  m.text = std::move(out);
  return m;
}

// --- external process execution ----------------------------------------------

// Non-throwing executable lookup: a path with a slash is checked directly,
// a bare name is searched on PATH.
inline std::optional<std::string> find_executable(const std::string& name) {
  if (name.empty()) return std::nullopt;
  if (name.find('/') != std::string::npos) {
    if (::access(name.c_str(), X_OK) == 0) return name;
    return std::nullopt;
  }
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    std::string cand = dir + "/" + name;
    if (::access(cand.c_str(), X_OK) == 0) return cand;
  }
  return std::nullopt;
}

// Writes the model to a file, runs the checker on it, and captures the
// combined output under a wall-clock timeout. The call never blocks past
// the timeout; an expired run is killed and flagged.
inline ToolRun run_external(
    const ToolConfig& cfg, const EmittedModel& model,
    const std::optional<std::string>& keep_file = std::nullopt) {
  std::optional<std::string> exe = find_executable(cfg.path);
  if (!exe)
    throw std::runtime_error("backend executable not found: " + cfg.path);

  std::string path;
  if (keep_file) {
    path = *keep_file;
    std::ofstream f(path, std::ios::binary);
    f << model.text;
    if (!f) throw std::runtime_error("cannot write model file " + path);
  } else {
    std::string suffix = model.format == "smv" ? ".smv" : ".c";
    const char* tmp = std::getenv("TMPDIR");
    std::string tmpl =
        std::string(tmp && *tmp ? tmp : "/tmp") + "/stverif-XXXXXX" + suffix;
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    int fd = ::mkstemps(buf.data(), static_cast<int>(suffix.size()));
    if (fd < 0) throw std::runtime_error("cannot create a temporary file");
    size_t off = 0;
    while (off < model.text.size()) {
      ssize_t k = ::write(fd, model.text.data() + off, model.text.size() - off);
      if (k <= 0) {
        ::close(fd);
        throw std::runtime_error("cannot write the model file");
      }
      off += static_cast<size_t>(k);
    }
    ::close(fd);
    path = buf.data();
  }

  ToolRun run;
  run.command.push_back(*exe);
  for (const std::string& s : cfg.extra_args) run.command.push_back(s);
  run.command.push_back(path);

  int fds[2];
  if (::pipe(fds) != 0) throw std::runtime_error("cannot create a pipe");
  auto t0 = std::chrono::steady_clock::now();
  pid_t pid = ::fork();
  if (pid < 0) throw std::runtime_error("cannot fork the checker process");
  if (pid == 0) {
    ::setpgid(0, 0);  // own process group, so a timeout kill reaps helpers
    ::dup2(fds[1], 1);
    ::dup2(fds[1], 2);
    ::close(fds[0]);
    ::close(fds[1]);
    std::vector<char*> argv;
    for (std::string& s : run.command) argv.push_back(s.data());
    argv.push_back(nullptr);
    ::execv(argv[0], argv.data());
    ::_exit(127);
  }
  ::close(fds[1]);

  auto deadline =
      t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
               std::chrono::duration<double>(cfg.timeout_s));
  char chunk[4096];
  for (;;) {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      if (::kill(-pid, SIGKILL) != 0) ::kill(pid, SIGKILL);
      run.timed_out = true;
      break;
    }
    int remaining_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now)
            .count());
    struct pollfd pfd = {fds[0], POLLIN, 0};
    int pr = ::poll(&pfd, 1, std::max(1, std::min(remaining_ms, 100)));
    if (pr < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (pr == 0) continue;
    ssize_t k = ::read(fds[0], chunk, sizeof chunk);
    if (k < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (k == 0) break;
    run.output.append(chunk, static_cast<size_t>(k));
  }
  // drain whatever was written before a kill; never block on a pipe that a
  // surviving grandchild may still hold open
  int fl = ::fcntl(fds[0], F_GETFL);
  if (fl >= 0) ::fcntl(fds[0], F_SETFL, fl | O_NONBLOCK);
  for (;;) {
    ssize_t k = ::read(fds[0], chunk, sizeof chunk);
    if (k <= 0) break;
    run.output.append(chunk, static_cast<size_t>(k));
  }
  ::close(fds[0]);

  int status = 0;
  ::waitpid(pid, &status, 0);
  if (WIFEXITED(status)) run.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status)) run.exit_code = 128 + WTERMSIG(status);
  run.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  if (!keep_file) ::unlink(path.c_str());
  return run;
}

// --- checker output parsing ----------------------------------------------------

namespace backend_detail {

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() &&
         s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

// Checker value text: TRUE/FALSE, plain decimal, or a NuSMV word constant
// like -0sd16_5 / 0sh16_ffff. A trailing annotation after a space is dropped.
inline std::optional<int32_t> parse_checker_value(std::string s) {
  s = trim(s);
  size_t sp = s.find(' ');
  if (sp != std::string::npos) s = s.substr(0, sp);
  if (s.empty()) return std::nullopt;
  if (s == "TRUE") return 1;
  if (s == "FALSE") return 0;
  bool neg = false;
  if (s[0] == '-') {
    neg = true;
    s = s.substr(1);
  }
  if (s.rfind("0s", 0) == 0 || s.rfind("0u", 0) == 0) {
    size_t us = s.find('_');
    if (us == std::string::npos || us + 1 >= s.size()) return std::nullopt;
    bool hex = s[2] == 'h';
    int width = 32;
    try {
      width = std::stoi(s.substr(3, us - 3));
    } catch (...) {
      return std::nullopt;
    }
    uint64_t raw = 0;
    try {
      raw = std::stoull(s.substr(us + 1), nullptr, hex ? 16 : 10);
    } catch (...) {
      return std::nullopt;
    }
    if (width >= 1 && width < 64) raw &= (uint64_t(1) << width) - 1;
    int64_t v = static_cast<int64_t>(raw);
    if (s[1] != 'u' && width >= 1 && width < 64 &&
        (raw & (uint64_t(1) << (width - 1))))
      v = static_cast<int64_t>(raw) - (int64_t(1) << width);
    return static_cast<int32_t>(neg ? -v : v);
  }
  try {
    size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) return std::nullopt;
    return static_cast<int32_t>(neg ? -v : v);
  } catch (...) {
    return std::nullopt;
  }
}

// Shared trace assembly: valuations keyed by source names, cycles closed at
// the recorded boundaries, and a final partial cycle closed at the last
// observed state. External checkers stop at the violation, so the final
// cycle's end values are the valuation at that point.
struct TraceBuilder {
  const EmittedModel* model = nullptr;
  std::map<std::string, int32_t> valuation;
  Trace trace;
  bool dirty = false;  // values seen since the last cycle boundary

  void set(const std::string& source_name, int32_t v) {
    valuation[source_name] = v;
    dirty = true;
  }

  void close_cycle() {
    dirty = false;
    CycleRecord rec;
    for (const std::string& n : model->input_names) {
      auto it = valuation.find(n);
      rec.inputs.emplace_back(Symbol::intern(n),
                              it == valuation.end() ? 0 : it->second);
    }
    for (const std::string& n : model->persistent_names) {
      auto it = valuation.find(n);
      rec.end_values.emplace_back(n, it == valuation.end() ? 0 : it->second);
    }
    trace.cycles.push_back(std::move(rec));
  }
};

inline Verdict parse_smv_output(const ToolRun& run, const EmittedModel& model) {
  Verdict v;
  std::optional<bool> holds;
  std::string invariant_text;

  std::istringstream in(run.output);
  std::string raw;
  std::vector<std::string> lines;
  while (std::getline(in, raw)) lines.push_back(raw);

  for (const std::string& l : lines) {
    std::string s = trim(l);
    if (s.rfind("-- invariant", 0) != 0) continue;
    if (ends_with(s, "is true")) {
      holds = true;
      invariant_text = trim(s.substr(12, s.size() - 12 - 7));
      break;
    }
    if (ends_with(s, "is false")) {
      holds = false;
      invariant_text = trim(s.substr(12, s.size() - 12 - 8));
      break;
    }
  }
  if (!holds) {
    v.kind = VerdictKind::Unknown;
    v.note = "unrecognized checker output: " +
             run.output.substr(0, std::min<size_t>(run.output.size(), 2000));
    return v;
  }
  if (*holds) {
    v.kind = VerdictKind::Satisfied;
    v.note = "the checker proves the property on all reachable states";
    return v;
  }

  TraceBuilder tb;
  tb.model = &model;
  LocRef cur_loc;
  LocRef last_loc;
  bool in_input_block = false;
  int states_seen = 0;
  bool state_open = false;
  auto finish_state = [&]() {
    if (!state_open) return;
    ++states_seen;
    last_loc = cur_loc;
    if (cur_loc.end) tb.close_cycle();
  };
  for (const std::string& l : lines) {
    std::string s = trim(l);
    if (s.rfind("-> State", 0) == 0) {
      finish_state();
      state_open = true;
      in_input_block = false;
      continue;
    }
    if (s.rfind("-> Input", 0) == 0) {
      in_input_block = true;
      continue;
    }
    if (in_input_block || !state_open) continue;
    size_t eq = s.find(" = ");
    if (eq == std::string::npos) continue;
    std::string name = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 3));
    if (name == "loc") {
      if (auto r = parse_loc_literal(val)) cur_loc = *r;
      continue;
    }
    const std::string* src = model.map.source_of(name);
    if (!src) continue;
    if (auto x = parse_checker_value(val)) tb.set(*src, *x);
  }
  finish_state();

  if (states_seen == 0) {
    v.kind = VerdictKind::Unknown;
    v.note = "counterexample reported without a parsable trace: " +
             run.output.substr(0, std::min<size_t>(run.output.size(), 2000));
    return v;
  }
  if (!last_loc.end) tb.close_cycle();  // partial violating cycle

  v.kind = VerdictKind::Violated;
  v.trace = std::move(tb.trace);
  Violation& viol = v.trace->violation;
  viol.cycle = std::max<int>(1, static_cast<int>(v.trace->cycles.size()));
  viol.location_id = last_loc.id;
  viol.anchor_id = last_loc.end ? -1 : last_loc.anchor;
  viol.fault = false;
  if (viol.anchor_id >= 0 && model.anchor_exprs.count(viol.anchor_id))
    viol.detail = model.anchor_exprs.at(viol.anchor_id);
  else if (!model.property_text.empty())
    viol.detail = model.property_text;
  else
    viol.detail = invariant_text;
  v.note = "counterexample parsed from checker output; end values of the "
           "final cycle are the valuation at the violation state";
  return v;
}

inline Verdict parse_cbmc_output(const ToolRun& run,
                                 const EmittedModel& model) {
  Verdict v;
  if (run.output.find("VERIFICATION SUCCESSFUL") != std::string::npos) {
    v.kind = VerdictKind::BoundReached;
    v.note = "no violation within the configured loop unwinding";
    return v;
  }
  if (run.output.find("VERIFICATION FAILED") == std::string::npos) {
    v.kind = VerdictKind::Unknown;
    v.note = "unrecognized checker output: " +
             run.output.substr(0, std::min<size_t>(run.output.size(), 2000));
    return v;
  }

  std::istringstream in(run.output);
  std::string raw;
  std::vector<std::string> lines;
  while (std::getline(in, raw)) lines.push_back(raw);

  // classify the failed properties: our labels mean a property violation,
  // anything else (division by zero, bounds) is a runtime fault
  std::string our_label;
  std::string fault_detail;
  for (const std::string& l : lines) {
    if (l.find("FAILURE") == std::string::npos) continue;
    size_t stv = l.find("stv: ");
    if (stv != std::string::npos) {
      std::string lab = trim(l.substr(stv));
      if (ends_with(lab, ": FAILURE"))
        lab = trim(lab.substr(0, lab.size() - 9));
      if (our_label.empty()) our_label = lab;
    } else if (fault_detail.empty()) {
      std::string lab = trim(l);
      if (ends_with(lab, ": FAILURE"))
        lab = trim(lab.substr(0, lab.size() - 9));
      if (!lab.empty() && lab[0] == '[') {
        size_t close = lab.find("] ");
        if (close != std::string::npos) lab = lab.substr(close + 2);
      }
      fault_detail = lab;
    }
  }

  TraceBuilder tb;
  tb.model = &model;
  int last_cycle_mark = 0;
  for (const std::string& l : lines) {
    std::string s = trim(l);
    size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0) continue;
    std::string name = trim(s.substr(0, eq));
    std::string val = s.substr(eq + 1);
    if (name == "stv_cycle") {
      auto x = parse_checker_value(val);
      if (x && *x > last_cycle_mark) {
        last_cycle_mark = *x;
        tb.close_cycle();
      }
      continue;
    }
    std::string base = name;
    std::optional<int64_t> idx;
    size_t br = name.find('[');
    if (br != std::string::npos && ends_with(name, "]")) {
      base = name.substr(0, br);
      try {
        idx = std::stoll(name.substr(br + 1, name.size() - br - 2));
      } catch (...) {
        continue;
      }
    }
    const std::string* src = model.map.source_of(base);
    if (!src) continue;
    auto x = parse_checker_value(val);
    if (!x) continue;
    if (idx) {
      auto lo = model.array_lo.find(base);
      int64_t source_idx = *idx + (lo == model.array_lo.end() ? 0 : lo->second);
      tb.set(*src + "[" + std::to_string(source_idx) + "]", *x);
    } else {
      tb.set(*src, *x);
    }
  }
  if (tb.dirty || tb.trace.cycles.empty()) tb.close_cycle();

  v.kind = our_label.empty() && !fault_detail.empty() ? VerdictKind::Fault
                                                      : VerdictKind::Violated;
  v.trace = std::move(tb.trace);
  Violation& viol = v.trace->violation;
  viol.cycle = std::max<int>(1, static_cast<int>(v.trace->cycles.size()));
  viol.fault = v.kind == VerdictKind::Fault;
  if (!our_label.empty()) {
    size_t ap = our_label.find("anchor=");
    size_t lp = our_label.find("loc=");
    size_t ep = our_label.find("expr=");
    if (ap != std::string::npos)
      viol.anchor_id = std::atoi(our_label.c_str() + ap + 7);
    if (lp != std::string::npos)
      viol.location_id = std::atoi(our_label.c_str() + lp + 4);
    if (our_label.find("end-of-cycle") != std::string::npos)
      viol.anchor_id = -1;
    viol.detail = ep != std::string::npos ? our_label.substr(ep + 5)
                                          : our_label;
  } else {
    viol.detail = fault_detail;
    viol.anchor_id = -1;
    viol.location_id = -1;
  }
  v.note = "counterexample parsed from checker output; end values of the "
           "final cycle are the valuation at the violation state";
  return v;
}

}  // namespace backend_detail

// Maps a finished checker run to a verdict. A timeout or unrecognizable
// output yields Unknown with the raw output attached in the note.
inline Verdict parse_tool_output(const ToolRun& run,
                                 const EmittedModel& model) {
  if (run.timed_out) {
    Verdict v;
    v.kind = VerdictKind::Unknown;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", run.seconds);
    v.note = std::string("external checker timed out after ") + buf + "s";
    return v;
  }
  if (model.format == "smv")
    return backend_detail::parse_smv_output(run, model);
  if (model.format == "c")
    return backend_detail::parse_cbmc_output(run, model);
  Verdict v;
  v.kind = VerdictKind::Unknown;
  v.note = "unknown model format: " + model.format;
  return v;
}

// --- one-call drivers ----------------------------------------------------------

inline Verdict run_nusmv(const VerificationProblem& p, ToolConfig cfg = {},
                         const std::optional<std::string>& keep_file =
                             std::nullopt) {
  if (cfg.path.empty()) cfg.path = "NuSMV";
  EmittedModel m = emit_smv(p);
  ToolRun r = run_external(cfg, m, keep_file);
  Verdict v = parse_tool_output(r, m);
  v.stats.wall_ms = r.seconds * 1000.0;
  return v;
}

// The scan loop (and every source loop) is unwound bound + 1 times without
// an unwinding assumption, so a violation within the cycle bound is found
// and a clean pass means no violation within that unwinding.
inline Verdict run_cbmc(const VerificationProblem& p, ToolConfig cfg = {},
                        const std::optional<std::string>& keep_file =
                            std::nullopt) {
  if (cfg.path.empty()) cfg.path = "cbmc";
  EmittedModel m = emit_c(p);
  ToolConfig full = cfg;
  full.extra_args = {"--trace", "--partial-loops", "--unwind",
                     std::to_string(p.job.bound + 1)};
  for (const std::string& s : cfg.extra_args) full.extra_args.push_back(s);
  ToolRun r = run_external(full, m, keep_file);
  Verdict v = parse_tool_output(r, m);
  v.stats.wall_ms = r.seconds * 1000.0;
  return v;
}

}  // namespace stverif
