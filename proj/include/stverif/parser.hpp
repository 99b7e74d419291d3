#pragma once
// Recursive-descent parser and type resolver for the Structured Text subset.
//
// Grammar (keywords case-insensitive, identifiers case-sensitive):
//   file     := unit*
//   unit     := ("PROGRAM"|"FUNCTION_BLOCK"|"FUNCTION") ident
//               var_section* stmt_list "END_..."
//   var_section := ("VAR_INPUT"|"VAR_OUTPUT"|"VAR"|"VAR" "CONSTANT"|"VAR_TEMP")
//                  decl* "END_VAR"
//   decl     := ident (',' ident)* ':' type (':=' init_literal)? ';'
//   stmt     := assign | if | case | for | while | repeat | call
//             | "RETURN" ';' | "EXIT" ';'
//   expr precedence: OR < XOR < AND < comparison < additive
//                    < multiplicative < unary NOT/-
//
// Assertion comments (//#ASSERT, //#ASSERT:name) at statement boundaries
// become AssertComment pseudo-statements carrying the raw expression text;
// extract_assertions() parses and type-checks these afterwards.
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stverif/ast.hpp"
#include "stverif/lexer.hpp"

namespace stverif {

struct ParseResult {
  std::shared_ptr<TypedAst> ast;          // null when any error was produced
  std::vector<std::vector<Token>> tokens; // per source file, comments included
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return ast != nullptr; }
};

namespace detail {

inline bool starts_with_assert_prefix(const std::string& lexeme) {
  return lexeme.rfind("//#ASSERT", 0) == 0;
}

// Splits "//#ASSERT expr" / "//#ASSERT:name expr" into (name, expr text,
// offset of expr text within the lexeme).
struct AssertCommentParts {
  std::string name;
  std::string text;
  uint32_t text_offset = 0;
  bool ok = false;
};

inline AssertCommentParts split_assert_comment(const std::string& lexeme) {
  AssertCommentParts parts;
  size_t i = std::string("//#ASSERT").size();
  if (i < lexeme.size() && lexeme[i] == ':') {
    ++i;
    size_t start = i;
    while (i < lexeme.size() &&
           (std::isalnum(static_cast<unsigned char>(lexeme[i])) ||
            lexeme[i] == '_'))
      ++i;
    parts.name = lexeme.substr(start, i - start);
    if (parts.name.empty()) return parts;
  }
  while (i < lexeme.size() &&
         std::isspace(static_cast<unsigned char>(lexeme[i])))
    ++i;
  parts.text = lexeme.substr(i);
  parts.text_offset = static_cast<uint32_t>(i);
  parts.ok = !parts.text.empty();
  return parts;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags)
      : toks_(std::move(tokens)), diags_(diags) {}

  // --- token cursor -------------------------------------------------------

  const Token& raw_peek() const { return toks_[pos_]; }

  // Non-mutating: looks past comments without consuming them, so assert
  // comments stay in place until a statement boundary collects them.
  const Token& peek() const {
    size_t i = pos_;
    while (toks_[i].kind == TokenKind::Comment) ++i;
    return toks_[i];
  }

  Token advance() {
    skip_comments_silently();
    Token t = toks_[pos_];
    if (toks_[pos_].kind != TokenKind::EndOfFile) ++pos_;
    return t;
  }

  bool at_keyword(const char* kw) {
    const Token& t = peek();
    return t.kind == TokenKind::Keyword && upper(t.lexeme) == kw;
  }

  bool eat_keyword(const char* kw) {
    if (!at_keyword(kw)) return false;
    advance();
    return true;
  }

  bool at_op(const char* op) {
    const Token& t = peek();
    return (t.kind == TokenKind::Operator || t.kind == TokenKind::Punct) &&
           t.lexeme == op;
  }

  bool eat_op(const char* op) {
    if (!at_op(op)) return false;
    advance();
    return true;
  }

  void expect_op(const char* op) {
    if (!eat_op(op))
      error(peek().span, std::string("expected '") + op + "', got '" +
                             describe(peek()) + "'");
  }

  void expect_keyword(const char* kw) {
    if (!eat_keyword(kw))
      error(peek().span, std::string("expected ") + kw + ", got '" +
                             describe(peek()) + "'");
  }

  void error(Span sp, std::string msg) {
    diags_.push_back(Diagnostic{Severity::Error, std::move(msg), sp});
    ++error_count_;
  }

  int error_count() const { return error_count_; }

  static std::string describe(const Token& t) {
    return t.kind == TokenKind::EndOfFile ? std::string("end of file")
                                          : t.lexeme;
  }

  // --- units --------------------------------------------------------------

  void parse_units(std::vector<Unit>& out, int& anchor_counter) {
    anchor_counter_ = &anchor_counter;
    while (peek().kind != TokenKind::EndOfFile) {
      if (at_keyword("PROGRAM")) {
        parse_unit(out, UnitKind::Program, "PROGRAM", "END_PROGRAM");
      } else if (at_keyword("FUNCTION_BLOCK")) {
        parse_unit(out, UnitKind::FunctionBlock, "FUNCTION_BLOCK",
                   "END_FUNCTION_BLOCK");
      } else if (at_keyword("FUNCTION")) {
        parse_unit(out, UnitKind::Function, "FUNCTION", "END_FUNCTION");
      } else {
        error(peek().span, "expected PROGRAM, FUNCTION_BLOCK or FUNCTION, "
                           "got '" + describe(peek()) + "'");
        return;
      }
      if (error_count_ > 50) return;  // stop piling up cascading errors
    }
  }

  // Expression entry for assertion directives and pattern placeholders.
  ExprPtr parse_expression_for_unit(const Unit& unit) {
    unit_ = &unit;
    scope_.clear();
    for (const auto& v : unit.vars) scope_[v.name] = &v;
    ExprPtr e = parse_expr();
    if (peek().kind != TokenKind::EndOfFile)
      error(peek().span, "unexpected trailing input after expression");
    return e;
  }

 private:
  void skip_comments_silently() {
    while (toks_[pos_].kind == TokenKind::Comment) ++pos_;
  }

  // At a statement boundary: convert any assert comments sitting here into
  // pseudo-statements instead of skipping them.
  void collect_assert_anchors(std::vector<Stmt>& body) {
    while (toks_[pos_].kind == TokenKind::Comment) {
      const Token& t = toks_[pos_];
      if (starts_with_assert_prefix(t.lexeme)) {
        AssertCommentParts parts = split_assert_comment(t.lexeme);
        if (!parts.ok) {
          error(t.span, "malformed assertion comment");
        } else {
          Stmt s;
          s.kind = Stmt::Kind::AssertComment;
          s.span = t.span;
          s.anchor_id = (*anchor_counter_)++;
          s.assert_name = parts.name;
          s.assert_text = parts.text;
          body.push_back(std::move(s));
        }
      }
      ++pos_;
    }
  }

  void parse_unit(std::vector<Unit>& out, UnitKind kind, const char* kw,
                  const char* end_kw) {
    Span start = peek().span;
    expect_keyword(kw);
    Unit u;
    u.kind = kind;
    u.span = start;
    const Token& name_tok = peek();
    if (name_tok.kind != TokenKind::Identifier) {
      error(name_tok.span, "expected unit name");
      return;
    }
    u.name = Symbol::intern(name_tok.lexeme);
    advance();

    // variable sections
    while (true) {
      if (at_keyword("VAR_INPUT")) {
        advance();
        parse_decls(u, VarKind::Input);
      } else if (at_keyword("VAR_OUTPUT")) {
        advance();
        parse_decls(u, VarKind::Output);
      } else if (at_keyword("VAR_TEMP")) {
        advance();
        parse_decls(u, VarKind::Temp);
      } else if (at_keyword("VAR")) {
        advance();
        VarKind k = eat_keyword("CONSTANT") ? VarKind::Constant : VarKind::Local;
        parse_decls(u, k);
      } else {
        break;
      }
    }

    unit_ = &u;
    scope_.clear();
    for (const auto& v : u.vars) scope_[v.name] = &v;

    u.body = parse_stmt_list({end_kw});
    expect_keyword(end_kw);
    eat_op(";");

    for (const auto& prev : out)
      if (prev.name == u.name)
        error(u.span, "duplicate unit name '" + std::string(u.name.str()) + "'");
    out.push_back(std::move(u));
    unit_ = nullptr;
  }

  void parse_decls(Unit& u, VarKind kind) {
    while (!at_keyword("END_VAR") && peek().kind != TokenKind::EndOfFile) {
      std::vector<Token> names;
      do {
        const Token& t = peek();
        if (t.kind != TokenKind::Identifier) {
          error(t.span, "expected variable name, got '" + describe(t) + "'");
          return;
        }
        names.push_back(t);
        advance();
      } while (eat_op(","));
      expect_op(":");
      ElementaryType ty = parse_type();

      std::optional<int32_t> init;
      if (eat_op(":=")) {
        init = parse_init_literal(ty);
      }
      if (kind == VarKind::Constant && !init)
        error(names.front().span,
              "constant '" + names.front().lexeme + "' requires an initializer");
      expect_op(";");

      for (const Token& nt : names) {
        VarDecl d;
        d.name = Symbol::intern(nt.lexeme);
        d.type = ty;
        d.kind = kind;
        d.init = init;
        d.span = nt.span;
        for (const auto& prev : u.vars)
          if (prev.name == d.name)
            error(nt.span, "duplicate declaration of '" + nt.lexeme + "'");
        u.vars.push_back(d);
      }
    }
    expect_keyword("END_VAR");
  }

  ElementaryType parse_type() {
    if (eat_keyword("BOOL")) return scalar_type(Scalar::Bool);
    if (eat_keyword("INT")) return scalar_type(Scalar::Int);
    if (eat_keyword("DINT")) return scalar_type(Scalar::Dint);
    if (eat_keyword("ARRAY")) {
      ElementaryType ty;
      ty.array = true;
      expect_op("[");
      ty.lo = parse_signed_int_literal();
      expect_op("..");
      ty.hi = parse_signed_int_literal();
      expect_op("]");
      expect_keyword("OF");
      if (eat_keyword("BOOL")) ty.base = Scalar::Bool;
      else if (eat_keyword("INT")) ty.base = Scalar::Int;
      else if (eat_keyword("DINT")) ty.base = Scalar::Dint;
      else error(peek().span, "array element type must be BOOL, INT or DINT");
      if (ty.lo > ty.hi)
        error(peek().span, "array lower bound exceeds upper bound");
      return ty;
    }
    error(peek().span, "expected type, got '" + describe(peek()) + "'");
    return scalar_type(Scalar::Bool);
  }

  int32_t parse_signed_int_literal() {
    bool neg = eat_op("-");
    const Token& t = peek();
    if (t.kind != TokenKind::IntLiteral) {
      error(t.span, "expected integer literal");
      return 0;
    }
    advance();
    int64_t v = neg ? -t.int_value : t.int_value;
    return static_cast<int32_t>(v);
  }

  std::optional<int32_t> parse_init_literal(const ElementaryType& ty) {
    const Token& t = peek();
    if (t.kind == TokenKind::BoolLiteral) {
      advance();
      if (ty.base != Scalar::Bool || ty.array)
        error(t.span, "initializer type mismatch");
      return static_cast<int32_t>(t.int_value);
    }
    if (t.kind == TokenKind::IntLiteral || at_op("-")) {
      Span sp = t.span;
      int32_t v = parse_signed_int_literal();
      if (ty.base == Scalar::Bool || ty.array) {
        error(sp, "initializer type mismatch");
        return 0;
      }
      if (ty.base == Scalar::Int && (v < -32768 || v > 32767))
        error(sp, "initializer out of INT range");
      return v;
    }
    error(t.span, "expected literal initializer");
    return std::nullopt;
  }

  // --- statements ---------------------------------------------------------

  bool at_stmt_list_end(const std::vector<const char*>& terminators,
                        bool stop_at_case_label) {
    if (peek().kind == TokenKind::EndOfFile) return true;
    if (stop_at_case_label &&
        (peek().kind == TokenKind::IntLiteral || at_op("-")))
      return true;
    for (const char* kw : terminators)
      if (at_keyword(kw)) return true;
    return false;
  }

  std::vector<Stmt> parse_stmt_list(std::vector<const char*> terminators,
                                    bool stop_at_case_label = false) {
    std::vector<Stmt> body;
    while (true) {
      collect_assert_anchors(body);
      if (at_stmt_list_end(terminators, stop_at_case_label)) break;
      size_t before = pos_;
      parse_stmt(body);
      if (pos_ == before) {
        advance();  // ensure progress on malformed input
        if (error_count_ > 50) break;
      }
    }
    return body;
  }

  void parse_stmt(std::vector<Stmt>& out) {
    const Token& t = peek();
    if (at_keyword("IF")) return parse_if(out);
    if (at_keyword("CASE")) return parse_case(out);
    if (at_keyword("FOR")) return parse_for(out);
    if (at_keyword("WHILE")) return parse_while(out);
    if (at_keyword("REPEAT")) return parse_repeat(out);
    if (at_keyword("RETURN")) {
      Stmt s;
      s.kind = Stmt::Kind::Return;
      s.span = t.span;
      advance();
      expect_op(";");
      out.push_back(std::move(s));
      return;
    }
    if (at_keyword("EXIT")) {
      Stmt s;
      s.kind = Stmt::Kind::Exit;
      s.span = t.span;
      advance();
      expect_op(";");
      if (loop_depth_ == 0) error(t.span, "EXIT outside of a loop");
      out.push_back(std::move(s));
      return;
    }
    if (t.kind == TokenKind::Identifier) {
      // lookahead: 'ident (' is a call, otherwise an assignment
      size_t save = pos_;
      advance();
      bool is_call = at_op("(");
      pos_ = save;
      if (is_call) return parse_call(out);
      return parse_assign(out);
    }
    error(t.span, "expected statement, got '" + describe(t) + "'");
  }

  LValue parse_lvalue() {
    LValue lv;
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier) {
      error(t.span, "expected variable, got '" + describe(t) + "'");
      return lv;
    }
    lv.var = Symbol::intern(t.lexeme);
    lv.span = t.span;
    advance();
    const VarDecl* d = lookup(lv.var, t.span);
    if (eat_op("[")) {
      lv.index = parse_expr();
      expect_op("]");
      if (lv.index && lv.index->type == Scalar::Bool)
        error(lv.index->span, "array index must have integer type");
      if (d && !d->type.array)
        error(t.span, "'" + t.lexeme + "' is not an array");
    } else if (d && d->type.array) {
      error(t.span, "whole-array assignment is not supported");
    }
    if (d && d->kind == VarKind::Constant)
      error(t.span, "cannot assign to constant '" + t.lexeme + "'");
    return lv;
  }

  void parse_assign(std::vector<Stmt>& out) {
    Stmt s;
    s.kind = Stmt::Kind::Assign;
    s.span = peek().span;
    s.lhs = parse_lvalue();
    expect_op(":=");
    s.rhs = parse_expr();
    Span end = peek().span;
    expect_op(";");
    s.span.hi = end.hi;

    const VarDecl* d = lookup_quiet(s.lhs.var);
    if (d && s.rhs) {
      Scalar target = d->type.base;
      if (!assignable(target, s.rhs->type))
        error(s.rhs->span, std::string("cannot assign ") +
                               scalar_name(s.rhs->type) + " to " +
                               scalar_name(target));
    }
    out.push_back(std::move(s));
  }

  void parse_call(std::vector<Stmt>& out) {
    Stmt s;
    s.kind = Stmt::Kind::Call;
    const Token& t = peek();
    s.span = t.span;
    s.callee = Symbol::intern(t.lexeme);
    advance();
    expect_op("(");
    if (!at_op(")")) {
      do {
        const Token& formal = peek();
        if (formal.kind != TokenKind::Identifier) {
          error(formal.span, "expected formal parameter name");
          break;
        }
        Symbol fsym = Symbol::intern(formal.lexeme);
        advance();
        if (eat_op(":=")) {
          s.in_binds.emplace_back(fsym, parse_expr());
        } else if (eat_op("=>")) {
          s.out_binds.emplace_back(fsym, parse_lvalue());
        } else {
          error(peek().span, "expected ':=' or '=>' in call binding");
          break;
        }
      } while (eat_op(","));
    }
    expect_op(")");
    Span end = peek().span;
    expect_op(";");
    s.span.hi = end.hi;
    out.push_back(std::move(s));
  }

  void parse_if(std::vector<Stmt>& out) {
    Stmt s;
    s.kind = Stmt::Kind::If;
    s.span = peek().span;
    expect_keyword("IF");
    while (true) {
      IfArm arm;
      arm.span = peek().span;
      arm.cond = parse_expr();
      if (arm.cond && arm.cond->type != Scalar::Bool)
        error(arm.cond->span, "condition must be BOOL");
      expect_keyword("THEN");
      arm.body = parse_stmt_list({"ELSIF", "ELSE", "END_IF"});
      s.arms.push_back(std::move(arm));
      if (eat_keyword("ELSIF")) continue;
      break;
    }
    if (eat_keyword("ELSE"))
      s.else_body = parse_stmt_list({"END_IF"});
    expect_keyword("END_IF");
    eat_op(";");
    out.push_back(std::move(s));
  }

  void parse_case(std::vector<Stmt>& out) {
    Stmt s;
    s.kind = Stmt::Kind::Case;
    s.span = peek().span;
    expect_keyword("CASE");
    s.selector = parse_expr();
    if (s.selector && s.selector->type == Scalar::Bool)
      error(s.selector->span, "CASE selector must have integer type");
    expect_keyword("OF");
    while (!at_keyword("ELSE") && !at_keyword("END_CASE") &&
           peek().kind != TokenKind::EndOfFile) {
      CaseBranch br;
      br.span = peek().span;
      do {
        int32_t lo = parse_signed_int_literal();
        int32_t hi = lo;
        if (eat_op("..")) hi = parse_signed_int_literal();
        if (lo > hi) error(br.span, "empty CASE range");
        br.ranges.emplace_back(lo, hi);
      } while (eat_op(","));
      expect_op(":");
      // a label-looking token sequence starts the next branch
      br.body = parse_stmt_list({"ELSE", "END_CASE"}, /*stop_at_case_label=*/true);
      s.branches.push_back(std::move(br));
    }
    if (eat_keyword("ELSE"))
      s.else_body = parse_stmt_list({"END_CASE"});
    expect_keyword("END_CASE");
    eat_op(";");
    out.push_back(std::move(s));
  }

  void parse_for(std::vector<Stmt>& out) {
    Stmt s;
    s.kind = Stmt::Kind::For;
    s.span = peek().span;
    expect_keyword("FOR");
    const Token& v = peek();
    if (v.kind != TokenKind::Identifier) {
      error(v.span, "expected FOR control variable");
      return;
    }
    s.for_var = Symbol::intern(v.lexeme);
    advance();
    const VarDecl* d = lookup(s.for_var, v.span);
    if (d) {
      if (d->type.array || d->type.base == Scalar::Bool)
        error(v.span, "FOR control variable must have integer type");
      if (d->kind == VarKind::Constant || d->kind == VarKind::Input)
        error(v.span, "FOR control variable must be assignable");
    }
    expect_op(":=");
    s.from = parse_expr();
    expect_keyword("TO");
    s.to = parse_expr();
    if (s.from && s.from->type == Scalar::Bool)
      error(s.from->span, "FOR bounds must have integer type");
    if (s.to && s.to->type == Scalar::Bool)
      error(s.to->span, "FOR bounds must have integer type");
    if (eat_keyword("BY")) {
      Span sp = peek().span;
      s.by = parse_signed_int_literal();
      if (s.by == 0) error(sp, "FOR step must not be zero");
    }
    expect_keyword("DO");
    ++loop_depth_;
    s.body = parse_stmt_list({"END_FOR"});
    --loop_depth_;
    expect_keyword("END_FOR");
    eat_op(";");
    out.push_back(std::move(s));
  }

  void parse_while(std::vector<Stmt>& out) {
    Stmt s;
    s.kind = Stmt::Kind::While;
    s.span = peek().span;
    expect_keyword("WHILE");
    s.cond = parse_expr();
    if (s.cond && s.cond->type != Scalar::Bool)
      error(s.cond->span, "condition must be BOOL");
    expect_keyword("DO");
    ++loop_depth_;
    s.body = parse_stmt_list({"END_WHILE"});
    --loop_depth_;
    expect_keyword("END_WHILE");
    eat_op(";");
    out.push_back(std::move(s));
  }

  void parse_repeat(std::vector<Stmt>& out) {
    Stmt s;
    s.kind = Stmt::Kind::Repeat;
    s.span = peek().span;
    expect_keyword("REPEAT");
    ++loop_depth_;
    s.body = parse_stmt_list({"UNTIL"});
    --loop_depth_;
    expect_keyword("UNTIL");
    s.cond = parse_expr();
    if (s.cond && s.cond->type != Scalar::Bool)
      error(s.cond->span, "condition must be BOOL");
    expect_keyword("END_REPEAT");
    eat_op(";");
    out.push_back(std::move(s));
  }

  // --- expressions --------------------------------------------------------

  const VarDecl* lookup(Symbol s, Span sp) {
    auto it = scope_.find(s);
    if (it == scope_.end()) {
      error(sp, "undeclared identifier '" + std::string(s.str()) + "'");
      return nullptr;
    }
    return it->second;
  }

  const VarDecl* lookup_quiet(Symbol s) const {
    auto it = scope_.find(s);
    return it == scope_.end() ? nullptr : it->second;
  }

  static bool assignable(Scalar target, Scalar value) {
    if (target == value) return true;
    return target == Scalar::Dint && value == Scalar::Int;  // widening
  }

  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    ExprPtr e = parse_xor();
    while (at_keyword("OR")) {
      Span sp = peek().span;
      advance();
      ExprPtr r = parse_xor();
      e = make_logical(BinOp::Or, e, r, sp);
    }
    return e;
  }

  ExprPtr parse_xor() {
    ExprPtr e = parse_and();
    while (at_keyword("XOR")) {
      Span sp = peek().span;
      advance();
      ExprPtr r = parse_and();
      e = make_logical(BinOp::Xor, e, r, sp);
    }
    return e;
  }

  ExprPtr parse_and() {
    ExprPtr e = parse_cmp();
    while (at_keyword("AND")) {
      Span sp = peek().span;
      advance();
      ExprPtr r = parse_cmp();
      e = make_logical(BinOp::And, e, r, sp);
    }
    return e;
  }

  ExprPtr parse_cmp() {
    ExprPtr e = parse_add();
    while (true) {
      BinOp op;
      if (at_op("=")) op = BinOp::Eq;
      else if (at_op("<>")) op = BinOp::Ne;
      else if (at_op("<=")) op = BinOp::Le;
      else if (at_op(">=")) op = BinOp::Ge;
      else if (at_op("<")) op = BinOp::Lt;
      else if (at_op(">")) op = BinOp::Gt;
      else break;
      Span sp = peek().span;
      advance();
      ExprPtr r = parse_add();
      if (!e || !r) return e;
      if (op == BinOp::Eq || op == BinOp::Ne) {
        bool both_bool = e->type == Scalar::Bool && r->type == Scalar::Bool;
        bool both_num = e->type != Scalar::Bool && r->type != Scalar::Bool;
        if (!both_bool && !both_num)
          error(sp, "comparison operands must have matching type category");
      } else {
        if (e->type == Scalar::Bool || r->type == Scalar::Bool)
          error(sp, "ordering comparison requires integer operands");
      }
      Span full{sp.file, e->span.lo, r->span.hi};
      e = Expr::binary(op, e, r, Scalar::Bool, full);
    }
    return e;
  }

  ExprPtr parse_add() {
    ExprPtr e = parse_mul();
    while (at_op("+") || at_op("-")) {
      BinOp op = at_op("+") ? BinOp::Add : BinOp::Sub;
      Span sp = peek().span;
      advance();
      ExprPtr r = parse_mul();
      e = make_arith(op, e, r, sp);
    }
    return e;
  }

  ExprPtr parse_mul() {
    ExprPtr e = parse_unary();
    while (at_op("*") || at_op("/") || at_keyword("MOD")) {
      BinOp op = at_op("*") ? BinOp::Mul
                 : at_op("/") ? BinOp::Div
                              : BinOp::Mod;
      Span sp = peek().span;
      advance();
      ExprPtr r = parse_unary();
      e = make_arith(op, e, r, sp);
    }
    return e;
  }

  ExprPtr parse_unary() {
    if (at_keyword("NOT")) {
      Span sp = peek().span;
      advance();
      ExprPtr e = parse_unary();
      if (e && e->type != Scalar::Bool)
        error(sp, "NOT requires a BOOL operand");
      if (!e) return e;
      return Expr::unary(UnOp::Not, e, Scalar::Bool,
                         Span{sp.file, sp.lo, e->span.hi});
    }
    if (at_op("-")) {
      Span sp = peek().span;
      advance();
      // an immediately following literal folds here, which is the only
      // place the magnitude 2^31 is legal
      if (peek().kind == TokenKind::IntLiteral) {
        Token lit = advance();
        int64_t v = -lit.int_value;
        Scalar ty = (v >= -32768 && v <= 32767) ? Scalar::Int : Scalar::Dint;
        return Expr::literal(ty, static_cast<int32_t>(v),
                             Span{sp.file, sp.lo, lit.span.hi});
      }
      ExprPtr e = parse_unary();
      if (!e) return e;
      if (e->type == Scalar::Bool) {
        error(sp, "unary minus requires an integer operand");
        return e;
      }
      // fold a negated literal immediately so INT bounds work naturally
      if (e->kind == Expr::Kind::Literal) {
        int64_t v = -static_cast<int64_t>(e->value);
        Scalar t = (v >= -32768 && v <= 32767) ? Scalar::Int : Scalar::Dint;
        return Expr::literal(t, static_cast<int32_t>(v),
                             Span{sp.file, sp.lo, e->span.hi});
      }
      return Expr::unary(UnOp::Neg, e, e->type,
                         Span{sp.file, sp.lo, e->span.hi});
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    if (t.kind == TokenKind::BoolLiteral) {
      advance();
      return Expr::literal(Scalar::Bool, static_cast<int32_t>(t.int_value),
                           t.span);
    }
    if (t.kind == TokenKind::IntLiteral) {
      advance();
      if (t.int_value > INT32_MAX) {
        error(t.span, "integer literal out of range");
        return Expr::literal(Scalar::Dint, INT32_MAX, t.span);
      }
      Scalar ty = (t.int_value >= -32768 && t.int_value <= 32767)
                      ? Scalar::Int
                      : Scalar::Dint;
      return Expr::literal(ty, static_cast<int32_t>(t.int_value), t.span);
    }
    if (at_op("(")) {
      advance();
      ExprPtr e = parse_expr();
      expect_op(")");
      return e;
    }
    if (t.kind == TokenKind::Identifier) {
      Symbol sym = Symbol::intern(t.lexeme);
      advance();
      const VarDecl* d = lookup(sym, t.span);
      if (eat_op("[")) {
        ExprPtr idx = parse_expr();
        Span end = peek().span;
        expect_op("]");
        if (idx && idx->type == Scalar::Bool)
          error(idx->span, "array index must have integer type");
        if (d && !d->type.array)
          error(t.span, "'" + t.lexeme + "' is not an array");
        Scalar elem = d ? d->type.base : Scalar::Int;
        return Expr::array_read(sym, idx, elem,
                                Span{t.span.file, t.span.lo, end.hi});
      }
      if (d && d->type.array) {
        error(t.span, "array '" + t.lexeme + "' must be indexed");
        return Expr::var_ref(sym, d->type.base, t.span);
      }
      return Expr::var_ref(sym, d ? d->type.base : Scalar::Bool, t.span);
    }
    error(t.span, "expected expression, got '" + describe(t) + "'");
    advance();
    return nullptr;
  }

  ExprPtr make_logical(BinOp op, ExprPtr l, ExprPtr r, Span sp) {
    if (!l || !r) return l ? l : r;
    if (l->type != Scalar::Bool || r->type != Scalar::Bool)
      error(sp, "logical operator requires BOOL operands");
    return Expr::binary(op, l, r, Scalar::Bool,
                        Span{sp.file, l->span.lo, r->span.hi});
  }

  ExprPtr make_arith(BinOp op, ExprPtr l, ExprPtr r, Span sp) {
    if (!l || !r) return l ? l : r;
    if (l->type == Scalar::Bool || r->type == Scalar::Bool) {
      error(sp, "arithmetic operator requires integer operands");
      return l;
    }
    Scalar t = (l->type == Scalar::Dint || r->type == Scalar::Dint)
                   ? Scalar::Dint
                   : Scalar::Int;
    return Expr::binary(op, l, r, t, Span{sp.file, l->span.lo, r->span.hi});
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::vector<Diagnostic>& diags_;
  int error_count_ = 0;
  int loop_depth_ = 0;
  const Unit* unit_ = nullptr;
  std::map<Symbol, const VarDecl*> scope_;
  int* anchor_counter_ = nullptr;
};

// Post-parse validation of call statements against callee declarations.
// Runs after all units are parsed so forward references work.
class CallValidator {
 public:
  CallValidator(const TypedAst& ast, std::vector<Diagnostic>& diags)
      : ast_(ast), diags_(diags) {}

  void run() {
    for (const Unit& u : ast_.units) {
      unit_ = &u;
      walk(u.body);
    }
  }

 private:
  void err(Span sp, std::string m) {
    diags_.push_back(Diagnostic{Severity::Error, std::move(m), sp});
  }

  static bool assignable(Scalar target, Scalar value) {
    return target == value || (target == Scalar::Dint && value == Scalar::Int);
  }

  void walk(const std::vector<Stmt>& body) {
    for (const Stmt& s : body) {
      switch (s.kind) {
        case Stmt::Kind::Call:
          check_call(s);
          break;
        case Stmt::Kind::If:
          for (const auto& arm : s.arms) walk(arm.body);
          walk(s.else_body);
          break;
        case Stmt::Kind::Case:
          for (const auto& br : s.branches) walk(br.body);
          walk(s.else_body);
          break;
        case Stmt::Kind::For:
        case Stmt::Kind::While:
        case Stmt::Kind::Repeat:
          walk(s.body);
          break;
        default:
          break;
      }
    }
  }

  void check_call(const Stmt& s) {
    const Unit* callee = ast_.find_unit(s.callee);
    if (!callee) {
      err(s.span,
          "call to undeclared unit '" + std::string(s.callee.str()) + "'");
      return;
    }
    if (callee->kind == UnitKind::Program) {
      err(s.span, "PROGRAM units are not callable");
      return;
    }
    if (callee->name == unit_->name) {
      err(s.span, "recursive call to '" + std::string(s.callee.str()) +
                      "' is not supported");
      return;
    }
    for (const auto& [formal, expr] : s.in_binds) {
      const VarDecl* d = callee->find_var(formal);
      if (!d || d->kind != VarKind::Input) {
        err(expr ? expr->span : s.span,
            "'" + std::string(formal.str()) + "' is not an input of '" +
                std::string(s.callee.str()) + "'");
        continue;
      }
      if (d->type.array) {
        err(expr ? expr->span : s.span, "cannot bind a whole-array parameter");
        continue;
      }
      if (expr && !assignable(d->type.base, expr->type))
        err(expr->span, std::string("cannot pass ") + scalar_name(expr->type) +
                            " for " + scalar_name(d->type.base) +
                            " parameter '" + std::string(formal.str()) + "'");
    }
    for (const auto& [formal, lv] : s.out_binds) {
      const VarDecl* d = callee->find_var(formal);
      if (!d || d->kind != VarKind::Output) {
        err(lv.span, "'" + std::string(formal.str()) +
                         "' is not an output of '" +
                         std::string(s.callee.str()) + "'");
        continue;
      }
      if (d->type.array) {
        err(lv.span, "cannot bind a whole-array parameter");
        continue;
      }
      const VarDecl* target = unit_->find_var(lv.var);
      if (target && !assignable(target->type.base, d->type.base))
        err(lv.span, std::string("cannot store ") + scalar_name(d->type.base) +
                         " output into " + scalar_name(target->type.base) +
                         " variable");
    }
  }

  const TypedAst& ast_;
  std::vector<Diagnostic>& diags_;
  const Unit* unit_ = nullptr;
};

}  // namespace detail

// Parses and type-checks a set of source files into one TypedAst.
// On any error the result carries a null ast plus the diagnostics.
inline ParseResult parse(std::vector<SourceUnit> sources) {
  ParseResult res;
  auto ast = std::make_shared<TypedAst>();
  ast->sources = std::move(sources);
  int anchor_counter = 0;
  for (size_t i = 0; i < ast->sources.size(); ++i) {
    LexResult lexed =
        tokenize(ast->sources[i], static_cast<int32_t>(i));
    for (auto& d : lexed.diagnostics) res.diagnostics.push_back(d);
    res.tokens.push_back(lexed.tokens);
    if (has_errors(lexed.diagnostics)) continue;
    detail::Parser p(std::move(lexed.tokens), res.diagnostics);
    p.parse_units(ast->units, anchor_counter);
  }
  ast->anchor_count = anchor_counter;
  if (!has_errors(res.diagnostics)) {
    detail::CallValidator v(*ast, res.diagnostics);
    v.run();
  }
  if (!has_errors(res.diagnostics)) res.ast = ast;
  return res;
}

// Parses expression text in the scope of one unit, for assertion directives
// and requirement pattern placeholders. Spans are rebased onto base so they
// point into the original source file.
inline ExprPtr parse_expr_in_scope(const Unit& unit, const std::string& text,
                                   Span base,
                                   std::vector<Diagnostic>& diags) {
  SourceUnit snippet{"<expr>", text};
  LexResult lexed = tokenize(snippet, base.file);
  for (Token& t : lexed.tokens) {
    t.span.lo += base.lo;
    t.span.hi += base.lo;
  }
  for (Diagnostic& d : lexed.diagnostics) {
    d.span.lo += base.lo;
    d.span.hi += base.lo;
    diags.push_back(d);
  }
  if (has_errors(lexed.diagnostics)) return nullptr;
  size_t before = diags.size();
  detail::Parser p(std::move(lexed.tokens), diags);
  ExprPtr e = p.parse_expression_for_unit(unit);
  if (diags.size() > before) return nullptr;
  return e;
}

}  // namespace stverif
