#pragma once
// Typed syntax tree for the Structured Text subset. Expressions are shared
// with the control-flow model: both layers use the same immutable Expr nodes.
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stverif/diag.hpp"
#include "stverif/symbol.hpp"

namespace stverif {

enum class Scalar : uint8_t { Bool, Int, Dint };

inline int32_t scalar_min(Scalar s) {
  switch (s) {
    case Scalar::Bool: return 0;
    case Scalar::Int: return -32768;
    case Scalar::Dint: return INT32_MIN;
  }
  return 0;
}

inline int32_t scalar_max(Scalar s) {
  switch (s) {
    case Scalar::Bool: return 1;
    case Scalar::Int: return 32767;
    case Scalar::Dint: return INT32_MAX;
  }
  return 0;
}

inline const char* scalar_name(Scalar s) {
  switch (s) {
    case Scalar::Bool: return "BOOL";
    case Scalar::Int: return "INT";
    case Scalar::Dint: return "DINT";
  }
  return "?";
}

// BOOL, INT, DINT or a one-dimensional array of one of those.
struct ElementaryType {
  Scalar base = Scalar::Bool;
  bool array = false;
  int32_t lo = 0, hi = 0;  // inclusive bounds, valid when array

  int32_t element_count() const { return array ? hi - lo + 1 : 1; }

  std::string to_string() const {
    if (!array) return scalar_name(base);
    return "ARRAY[" + std::to_string(lo) + ".." + std::to_string(hi) +
           "] OF " + scalar_name(base);
  }

  friend bool operator==(const ElementaryType&,
                         const ElementaryType&) = default;
};

inline ElementaryType scalar_type(Scalar s) { return ElementaryType{s}; }

enum class VarKind : uint8_t { Input, Output, Local, Temp, Constant };

inline const char* var_kind_name(VarKind k) {
  switch (k) {
    case VarKind::Input: return "input";
    case VarKind::Output: return "output";
    case VarKind::Local: return "local";
    case VarKind::Temp: return "temp";
    case VarKind::Constant: return "constant";
  }
  return "?";
}

struct VarDecl {
  Symbol name;
  ElementaryType type;
  VarKind kind = VarKind::Local;
  std::optional<int32_t> init;  // scalar initializer; arrays are zero-filled
  Span span;
};

enum class UnOp : uint8_t { Not, Neg };
enum class BinOp : uint8_t {
  And, Or, Xor,
  Eq, Ne, Lt, Le, Gt, Ge,
  Add, Sub, Mul, Div, Mod
};

inline bool is_comparison(BinOp op) {
  return op == BinOp::Eq || op == BinOp::Ne || op == BinOp::Lt ||
         op == BinOp::Le || op == BinOp::Gt || op == BinOp::Ge;
}

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind : uint8_t { Literal, VarRef, ArrayRead, Unary, Binary, Nondet };

  Kind kind = Kind::Literal;
  Scalar type = Scalar::Bool;  // result type; always scalar
  Span span;

  int32_t value = 0;  // Literal
  Symbol var;         // VarRef, ArrayRead
  ExprPtr index;      // ArrayRead
  UnOp un{};          // Unary
  BinOp bin{};        // Binary
  ExprPtr a, b;       // Unary operand / Binary operands

  // Nondet: explicit value set when present, otherwise the full type range.
  std::optional<std::vector<int32_t>> domain;

  static ExprPtr literal(Scalar t, int32_t v, Span sp = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Literal;
    e->type = t;
    e->value = v;
    e->span = sp;
    return e;
  }
  static ExprPtr var_ref(Symbol name, Scalar t, Span sp = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::VarRef;
    e->type = t;
    e->var = name;
    e->span = sp;
    return e;
  }
  static ExprPtr array_read(Symbol name, ExprPtr idx, Scalar elem, Span sp = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::ArrayRead;
    e->type = elem;
    e->var = name;
    e->index = std::move(idx);
    e->span = sp;
    return e;
  }
  static ExprPtr unary(UnOp op, ExprPtr operand, Scalar t, Span sp = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Unary;
    e->type = t;
    e->un = op;
    e->a = std::move(operand);
    e->span = sp;
    return e;
  }
  static ExprPtr binary(BinOp op, ExprPtr lhs, ExprPtr rhs, Scalar t,
                        Span sp = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Binary;
    e->type = t;
    e->bin = op;
    e->a = std::move(lhs);
    e->b = std::move(rhs);
    e->span = sp;
    return e;
  }
  static ExprPtr nondet(Scalar t, std::optional<std::vector<int32_t>> dom = {},
                        Span sp = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Nondet;
    e->type = t;
    e->domain = std::move(dom);
    e->span = sp;
    return e;
  }

  static ExprPtr true_lit() { return literal(Scalar::Bool, 1); }
  static ExprPtr false_lit() { return literal(Scalar::Bool, 0); }

  bool is_literal(int32_t v) const {
    return kind == Kind::Literal && value == v;
  }
  bool is_true() const { return kind == Kind::Literal && value != 0; }
  bool is_false() const { return is_literal(0); }
};

inline ExprPtr make_not(ExprPtr e) {
  return Expr::unary(UnOp::Not, std::move(e), Scalar::Bool);
}
inline ExprPtr make_and(ExprPtr a, ExprPtr b) {
  return Expr::binary(BinOp::And, std::move(a), std::move(b), Scalar::Bool);
}
inline ExprPtr make_or(ExprPtr a, ExprPtr b) {
  return Expr::binary(BinOp::Or, std::move(a), std::move(b), Scalar::Bool);
}

// Assignment target: scalar variable or one array element.
struct LValue {
  Symbol var;
  ExprPtr index;  // null for scalars
  Span span;
};

struct Stmt;

struct IfArm {
  ExprPtr cond;
  std::vector<Stmt> body;
  Span span;
};

struct CaseBranch {
  std::vector<std::pair<int32_t, int32_t>> ranges;  // inclusive value ranges
  std::vector<Stmt> body;
  Span span;
};

struct Stmt {
  enum class Kind : uint8_t {
    Assign, If, Case, For, While, Repeat, Call, Return, Exit, AssertComment
  };

  Kind kind = Kind::Assign;
  Span span;

  // Assign
  LValue lhs;
  ExprPtr rhs;
  // If: arms[0] is IF, the rest ELSIF; else_body may be empty
  std::vector<IfArm> arms;
  std::vector<Stmt> else_body;
  // Case
  ExprPtr selector;
  std::vector<CaseBranch> branches;
  // For
  Symbol for_var;
  ExprPtr from, to;
  int32_t by = 1;
  // For/While/Repeat
  ExprPtr cond;
  std::vector<Stmt> body;
  // Call: formal bindings only
  Symbol callee;
  std::vector<std::pair<Symbol, ExprPtr>> in_binds;
  std::vector<std::pair<Symbol, LValue>> out_binds;
  // AssertComment: an assertion directive anchored between two statements
  int anchor_id = -1;
  std::string assert_name;
  std::string assert_text;
};

enum class UnitKind : uint8_t { Program, FunctionBlock, Function };

inline const char* unit_kind_name(UnitKind k) {
  switch (k) {
    case UnitKind::Program: return "PROGRAM";
    case UnitKind::FunctionBlock: return "FUNCTION_BLOCK";
    case UnitKind::Function: return "FUNCTION";
  }
  return "?";
}

struct Unit {
  Symbol name;
  UnitKind kind = UnitKind::Program;
  std::vector<VarDecl> vars;
  std::vector<Stmt> body;
  Span span;

  const VarDecl* find_var(Symbol s) const {
    for (const auto& v : vars)
      if (v.name == s) return &v;
    return nullptr;
  }
};

struct TypedAst {
  std::vector<SourceUnit> sources;
  std::vector<Unit> units;
  int anchor_count = 0;  // number of AssertComment statements

  const Unit* find_unit(Symbol s) const {
    for (const auto& u : units)
      if (u.name == s) return &u;
    return nullptr;
  }
};

using TypedAstPtr = std::shared_ptr<const TypedAst>;

// Assertion directive extracted from a //#ASSERT comment.
struct AssertionDirective {
  std::string name;      // optional label; empty when unnamed
  std::string expression_text;
  Span span;             // location of the comment
  int anchor_id = -1;    // AssertComment statement this directive anchors at
  Symbol unit;           // unit whose scope the expression was resolved in
  ExprPtr expr;          // parsed and type-checked BOOL expression
};

}  // namespace stverif
