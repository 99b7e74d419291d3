#pragma once
// Renders expressions back to Structured Text. Output reparses to a
// structurally identical tree (minimal parentheses, precedence-aware),
// except nondeterministic-choice markers which only appear in debug dumps.
#include <string>

#include "stverif/ast.hpp"

namespace stverif {

namespace detail {

inline int precedence_of(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Binary:
      switch (e.bin) {
        case BinOp::Or: return 1;
        case BinOp::Xor: return 2;
        case BinOp::And: return 3;
        case BinOp::Eq: case BinOp::Ne: case BinOp::Lt:
        case BinOp::Le: case BinOp::Gt: case BinOp::Ge: return 4;
        case BinOp::Add: case BinOp::Sub: return 5;
        case BinOp::Mul: case BinOp::Div: case BinOp::Mod: return 6;
      }
      return 0;
    case Expr::Kind::Unary:
      return 7;
    default:
      return 8;  // literals, reads
  }
}

inline const char* bin_op_text(BinOp op) {
  switch (op) {
    case BinOp::And: return "AND";
    case BinOp::Or: return "OR";
    case BinOp::Xor: return "XOR";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "<>";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "MOD";
  }
  return "?";
}

inline void render_expr(const Expr& e, std::string& out, int min_prec) {
  int prec = precedence_of(e);
  bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (e.kind) {
    case Expr::Kind::Literal:
      if (e.type == Scalar::Bool)
        out += e.value ? "TRUE" : "FALSE";
      else
        out += std::to_string(e.value);
      break;
    case Expr::Kind::VarRef:
      out += e.var.str();
      break;
    case Expr::Kind::ArrayRead:
      out += e.var.str();
      out += '[';
      render_expr(*e.index, out, 0);
      out += ']';
      break;
    case Expr::Kind::Unary:
      out += e.un == UnOp::Not ? "NOT " : "-";
      render_expr(*e.a, out, 7);
      break;
    case Expr::Kind::Binary: {
      render_expr(*e.a, out, prec);
      out += ' ';
      out += bin_op_text(e.bin);
      out += ' ';
      render_expr(*e.b, out, prec + 1);
      break;
    }
    case Expr::Kind::Nondet:
      out += '?';
      if (e.domain) {
        out += '{';
        for (size_t i = 0; i < e.domain->size(); ++i) {
          if (i) out += ',';
          out += std::to_string((*e.domain)[i]);
        }
        out += '}';
      }
      break;
  }
  if (parens) out += ')';
}

}  // namespace detail

inline std::string expr_to_string(const Expr& e) {
  std::string out;
  detail::render_expr(e, out, 0);
  return out;
}

inline std::string expr_to_string(const ExprPtr& e) {
  return e ? expr_to_string(*e) : std::string("<null>");
}

// Structural equality of expression trees (spans ignored).
inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->type != b->type) return false;
  switch (a->kind) {
    case Expr::Kind::Literal:
      return a->value == b->value;
    case Expr::Kind::VarRef:
      return a->var == b->var;
    case Expr::Kind::ArrayRead:
      return a->var == b->var && expr_equal(a->index, b->index);
    case Expr::Kind::Unary:
      return a->un == b->un && expr_equal(a->a, b->a);
    case Expr::Kind::Binary:
      return a->bin == b->bin && expr_equal(a->a, b->a) &&
             expr_equal(a->b, b->b);
    case Expr::Kind::Nondet:
      return a->domain == b->domain;
  }
  return false;
}

}  // namespace stverif
