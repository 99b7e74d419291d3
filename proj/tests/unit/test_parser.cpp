#include <catch2/catch_amalgamated.hpp>

#include "stverif/parser.hpp"
#include "stverif/printing.hpp"

using namespace stverif;

namespace {

ParseResult parse_text(const std::string& src) {
  return parse({SourceUnit{"test.st", src}});
}

std::string first_error(const ParseResult& r) {
  for (const auto& d : r.diagnostics)
    if (d.severity == Severity::Error) return d.message;
  return "";
}

const char* kMinimal = R"(
PROGRAM Main
VAR_INPUT a : BOOL; END_VAR
VAR_OUTPUT q : BOOL; END_VAR
  q := a;
END_PROGRAM
)";

}  // namespace

TEST_CASE("minimal program parses into one unit") {
  ParseResult r = parse_text(kMinimal);
  REQUIRE(r.ok());
  REQUIRE(r.ast->units.size() == 1);
  const Unit& u = r.ast->units[0];
  CHECK(u.kind == UnitKind::Program);
  CHECK(u.name.str() == "Main");
  REQUIRE(u.vars.size() == 2);
  CHECK(u.vars[0].kind == VarKind::Input);
  CHECK(u.vars[1].kind == VarKind::Output);
  REQUIRE(u.body.size() == 1);
  CHECK(u.body[0].kind == Stmt::Kind::Assign);
}

TEST_CASE("keywords and type names are case-insensitive") {
  ParseResult r = parse_text(
      "program Main var_input A : bool; end_var a := NOT A; end_program");
  // identifiers are case-sensitive, so `a` is undeclared
  REQUIRE_FALSE(r.ok());
  CHECK_THAT(first_error(r), Catch::Matchers::ContainsSubstring("undeclared"));

  ParseResult r2 = parse_text(
      "program Main var_input A : bool; end_var var q : Bool; end_var "
      "q := not A; end_program");
  REQUIRE(r2.ok());
}

TEST_CASE("declaration sections and initializers") {
  ParseResult r = parse_text(R"(
PROGRAM Main
VAR_INPUT  a : BOOL; n : INT; END_VAR
VAR_OUTPUT q : BOOL := TRUE; END_VAR
VAR        x : DINT := -5; arr : ARRAY[1..4] OF INT; END_VAR
VAR_TEMP   t : INT; END_VAR
VAR CONSTANT LIMIT : INT := 100; END_VAR
  q := a;
END_PROGRAM
)");
  REQUIRE(r.ok());
  const Unit& u = r.ast->units[0];
  REQUIRE(u.vars.size() == 7);
  CHECK(u.vars[2].init == std::optional<int32_t>(1));
  CHECK(u.vars[3].init == std::optional<int32_t>(-5));
  CHECK(u.vars[4].type.array);
  CHECK(u.vars[4].type.lo == 1);
  CHECK(u.vars[4].type.hi == 4);
  CHECK(u.vars[5].kind == VarKind::Temp);
  CHECK(u.vars[6].kind == VarKind::Constant);
  CHECK(u.vars[6].init == std::optional<int32_t>(100));
}

TEST_CASE("operator precedence follows the language definition") {
  ParseResult r = parse_text(R"(
PROGRAM Main
VAR a, b, c : BOOL; x, y : INT; q : BOOL; END_VAR
  q := a OR b AND c;
  x := 1 + 2 * 3;
  q := x + 1 > y;
  q := NOT a AND b;
  q := a XOR b OR c;
END_PROGRAM
)");
  REQUIRE(r.ok());
  const auto& body = r.ast->units[0].body;

  // a OR (b AND c)
  CHECK(expr_to_string(body[0].rhs) == "a OR b AND c");
  CHECK(body[0].rhs->bin == BinOp::Or);
  CHECK(body[0].rhs->b->bin == BinOp::And);

  // 1 + (2 * 3)
  CHECK(body[1].rhs->bin == BinOp::Add);
  CHECK(body[1].rhs->b->bin == BinOp::Mul);

  // comparison binds looser than additive
  CHECK(body[2].rhs->bin == BinOp::Gt);
  CHECK(body[2].rhs->a->bin == BinOp::Add);

  // NOT binds tighter than AND
  CHECK(body[3].rhs->bin == BinOp::And);
  CHECK(body[3].rhs->a->kind == Expr::Kind::Unary);

  // OR is looser than XOR: (a XOR b) OR c
  CHECK(body[4].rhs->bin == BinOp::Or);
  CHECK(body[4].rhs->a->bin == BinOp::Xor);
}

TEST_CASE("parenthesized expressions override precedence") {
  ParseResult r = parse_text(R"(
PROGRAM Main
VAR x : INT; END_VAR
  x := (1 + 2) * 3;
END_PROGRAM
)");
  REQUIRE(r.ok());
  const ExprPtr& e = r.ast->units[0].body[0].rhs;
  CHECK(e->bin == BinOp::Mul);
  CHECK(e->a->bin == BinOp::Add);
}

TEST_CASE("integer literal typing: INT when it fits, DINT otherwise") {
  ParseResult r = parse_text(R"(
PROGRAM Main
VAR x : INT; y : DINT; END_VAR
  x := 32767;
  y := 32768;
  x := -32768;
  y := -2147483648;
  y := 16#7FFFFFFF;
END_PROGRAM
)");
  REQUIRE(r.ok());
  const auto& body = r.ast->units[0].body;
  CHECK(body[0].rhs->type == Scalar::Int);
  CHECK(body[1].rhs->type == Scalar::Dint);
  CHECK(body[2].rhs->type == Scalar::Int);
  CHECK(body[2].rhs->value == -32768);
  CHECK(body[3].rhs->type == Scalar::Dint);
  CHECK(body[3].rhs->value == INT32_MIN);
  CHECK(body[4].rhs->value == INT32_MAX);
}

TEST_CASE("assignability: DINT accepts INT, not the reverse") {
  ParseResult ok = parse_text(
      "PROGRAM Main VAR x : INT; y : DINT; END_VAR y := x; END_PROGRAM");
  REQUIRE(ok.ok());

  ParseResult bad = parse_text(
      "PROGRAM Main VAR x : INT; y : DINT; END_VAR x := y; END_PROGRAM");
  REQUIRE_FALSE(bad.ok());
  CHECK_THAT(first_error(bad), Catch::Matchers::ContainsSubstring("DINT"));

  ParseResult bad2 = parse_text(
      "PROGRAM Main VAR q : BOOL; x : INT; END_VAR q := x; END_PROGRAM");
  REQUIRE_FALSE(bad2.ok());
}

TEST_CASE("undeclared identifier is reported with its name") {
  ParseResult r = parse_text(
      "PROGRAM Main VAR q : BOOL; END_VAR q := missing; END_PROGRAM");
  REQUIRE_FALSE(r.ok());
  CHECK_THAT(first_error(r), Catch::Matchers::ContainsSubstring("missing"));
}

TEST_CASE("IF with ELSIF chain and nested IF") {
  ParseResult r = parse_text(R"(
PROGRAM Main
VAR a, b : BOOL; x : INT; END_VAR
  IF a THEN
    x := 1;
  ELSIF b THEN
    IF a THEN x := 2; END_IF;
  ELSE
    x := 3;
  END_IF;
END_PROGRAM
)");
  REQUIRE(r.ok());
  const Stmt& s = r.ast->units[0].body[0];
  REQUIRE(s.kind == Stmt::Kind::If);
  REQUIRE(s.arms.size() == 2);
  CHECK(s.arms[1].body[0].kind == Stmt::Kind::If);
  REQUIRE(s.else_body.size() == 1);
}

TEST_CASE("IF condition must be BOOL") {
  ParseResult r = parse_text(
      "PROGRAM Main VAR x : INT; END_VAR IF x THEN x := 1; END_IF; "
      "END_PROGRAM");
  REQUIRE_FALSE(r.ok());
  CHECK_THAT(first_error(r), Catch::Matchers::ContainsSubstring("BOOL"));
}

TEST_CASE("CASE with single labels, ranges, lists and ELSE") {
  ParseResult r = parse_text(R"(
PROGRAM Main
VAR x : INT; q : BOOL; END_VAR
  CASE x OF
    1: q := TRUE;
    2, 4: q := FALSE;
    5..9: q := TRUE;
  ELSE
    q := FALSE;
  END_CASE;
END_PROGRAM
)");
  REQUIRE(r.ok());
  const Stmt& s = r.ast->units[0].body[0];
  REQUIRE(s.kind == Stmt::Kind::Case);
  REQUIRE(s.branches.size() == 3);
  CHECK(s.branches[0].ranges ==
        std::vector<std::pair<int32_t, int32_t>>{{1, 1}});
  CHECK(s.branches[1].ranges ==
        std::vector<std::pair<int32_t, int32_t>>{{2, 2}, {4, 4}});
  CHECK(s.branches[2].ranges ==
        std::vector<std::pair<int32_t, int32_t>>{{5, 9}});
  CHECK(s.else_body.size() == 1);
}

TEST_CASE("CASE selector must be an integer type") {
  ParseResult r = parse_text(
      "PROGRAM Main VAR b : BOOL; END_VAR CASE b OF 1: b := TRUE; END_CASE; "
      "END_PROGRAM");
  REQUIRE_FALSE(r.ok());
}

TEST_CASE("FOR loop with BY and EXIT") {
  ParseResult r = parse_text(R"(
PROGRAM Main
VAR i, s : INT; END_VAR
  FOR i := 10 TO 0 BY -2 DO
    s := s + i;
    IF s > 20 THEN EXIT; END_IF;
  END_FOR;
END_PROGRAM
)");
  REQUIRE(r.ok());
  const Stmt& s = r.ast->units[0].body[0];
  REQUIRE(s.kind == Stmt::Kind::For);
  CHECK(s.by == -2);
  CHECK(s.for_var.str() == "i");
}

TEST_CASE("FOR rejects non-integer and read-only control variables") {
  ParseResult r1 = parse_text(
      "PROGRAM Main VAR b : BOOL; END_VAR FOR b := 0 TO 3 DO END_FOR; "
      "END_PROGRAM");
  REQUIRE_FALSE(r1.ok());

  ParseResult r2 = parse_text(
      "PROGRAM Main VAR_INPUT i : INT; END_VAR FOR i := 0 TO 3 DO END_FOR; "
      "END_PROGRAM");
  REQUIRE_FALSE(r2.ok());

  ParseResult r3 = parse_text(
      "PROGRAM Main VAR CONSTANT i : INT := 0; END_VAR "
      "FOR i := 0 TO 3 DO END_FOR; END_PROGRAM");
  REQUIRE_FALSE(r3.ok());
}

TEST_CASE("EXIT outside a loop is an error") {
  ParseResult r = parse_text("PROGRAM Main VAR x : INT; END_VAR EXIT; "
                             "END_PROGRAM");
  REQUIRE_FALSE(r.ok());
  CHECK_THAT(first_error(r), Catch::Matchers::ContainsSubstring("loop"));
}

TEST_CASE("WHILE and REPEAT loops") {
  ParseResult r = parse_text(R"(
PROGRAM Main
VAR x : INT; END_VAR
  WHILE x < 10 DO x := x + 1; END_WHILE;
  REPEAT x := x - 1; UNTIL x = 0 END_REPEAT;
END_PROGRAM
)");
  REQUIRE(r.ok());
  CHECK(r.ast->units[0].body[0].kind == Stmt::Kind::While);
  CHECK(r.ast->units[0].body[1].kind == Stmt::Kind::Repeat);
}

TEST_CASE("assignment to constants and inputs is rejected") {
  ParseResult r1 = parse_text(
      "PROGRAM Main VAR CONSTANT c : INT := 1; END_VAR c := 2; END_PROGRAM");
  REQUIRE_FALSE(r1.ok());

  // writing an input is allowed by the language subset
  ParseResult r2 = parse_text(
      "PROGRAM Main VAR_INPUT a : BOOL; END_VAR a := TRUE; END_PROGRAM");
  REQUIRE(r2.ok());
}

TEST_CASE("array access requires an index; whole-array use is rejected") {
  ParseResult r1 = parse_text(
      "PROGRAM Main VAR a : ARRAY[0..3] OF INT; x : INT; END_VAR "
      "a[1] := x; x := a[2]; END_PROGRAM");
  REQUIRE(r1.ok());

  ParseResult r2 = parse_text(
      "PROGRAM Main VAR a : ARRAY[0..3] OF INT; x : INT; END_VAR "
      "x := a; END_PROGRAM");
  REQUIRE_FALSE(r2.ok());

  ParseResult r3 = parse_text(
      "PROGRAM Main VAR a : ARRAY[0..3] OF INT; END_VAR a := 1; END_PROGRAM");
  REQUIRE_FALSE(r3.ok());
}

TEST_CASE("array index must be an integer expression") {
  ParseResult r = parse_text(
      "PROGRAM Main VAR a : ARRAY[0..3] OF INT; b : BOOL; x : INT; END_VAR "
      "x := a[b]; END_PROGRAM");
  REQUIRE_FALSE(r.ok());
}

TEST_CASE("function block call with formal bindings") {
  ParseResult r = parse_text(R"(
FUNCTION_BLOCK Doubler
VAR_INPUT in : INT; END_VAR
VAR_OUTPUT out : INT; END_VAR
  out := in + in;
END_FUNCTION_BLOCK

PROGRAM Main
VAR x, y : INT; END_VAR
  Doubler(in := x + 1, out => y);
END_PROGRAM
)");
  REQUIRE(r.ok());
  const Unit* main = r.ast->find_unit(Symbol::intern("Main"));
  REQUIRE(main != nullptr);
  const Stmt& s = main->body[0];
  REQUIRE(s.kind == Stmt::Kind::Call);
  CHECK(s.callee.str() == "Doubler");
  REQUIRE(s.in_binds.size() == 1);
  REQUIRE(s.out_binds.size() == 1);
  CHECK(s.out_binds[0].second.var.str() == "y");
}

TEST_CASE("call validation catches bad callees and bindings") {
  // unknown callee
  ParseResult r1 = parse_text(
      "PROGRAM Main VAR x : INT; END_VAR Nope(in := x); END_PROGRAM");
  REQUIRE_FALSE(r1.ok());

  // calling a PROGRAM
  ParseResult r2 = parse_text(R"(
PROGRAM Other VAR x : INT; END_VAR x := 1; END_PROGRAM
PROGRAM Main VAR x : INT; END_VAR Other(); END_PROGRAM
)");
  REQUIRE_FALSE(r2.ok());

  // binding an unknown formal
  ParseResult r3 = parse_text(R"(
FUNCTION_BLOCK F VAR_INPUT in : INT; END_VAR VAR_OUTPUT out : INT; END_VAR
  out := in;
END_FUNCTION_BLOCK
PROGRAM Main VAR x : INT; END_VAR F(bogus := x); END_PROGRAM
)");
  REQUIRE_FALSE(r3.ok());

  // input bound with => direction
  ParseResult r4 = parse_text(R"(
FUNCTION_BLOCK F VAR_INPUT in : INT; END_VAR VAR_OUTPUT out : INT; END_VAR
  out := in;
END_FUNCTION_BLOCK
PROGRAM Main VAR x : INT; END_VAR F(in => x); END_PROGRAM
)");
  REQUIRE_FALSE(r4.ok());

  // output must land in an assignable lvalue of matching type
  ParseResult r5 = parse_text(R"(
FUNCTION_BLOCK F VAR_INPUT in : INT; END_VAR VAR_OUTPUT out : INT; END_VAR
  out := in;
END_FUNCTION_BLOCK
PROGRAM Main VAR b : BOOL; x : INT; END_VAR F(in := x, out => b); END_PROGRAM
)");
  REQUIRE_FALSE(r5.ok());
}

TEST_CASE("direct self-recursion is rejected") {
  ParseResult r = parse_text(R"(
FUNCTION_BLOCK F
VAR_INPUT in : INT; END_VAR
VAR_OUTPUT out : INT; END_VAR
  F(in := in, out => out);
END_FUNCTION_BLOCK
PROGRAM Main VAR x : INT; END_VAR F(in := x, out => x); END_PROGRAM
)");
  REQUIRE_FALSE(r.ok());
  CHECK_THAT(first_error(r), Catch::Matchers::ContainsSubstring("recursi"));
}

TEST_CASE("assert comments become anchored pseudo-statements in order") {
  ParseResult r = parse_text(R"(
PROGRAM Main
VAR q : BOOL; x : INT; END_VAR
  //#ASSERT NOT q
  x := 1;
  //#ASSERT:mid x = 1
  q := TRUE;
  //#ASSERT q
END_PROGRAM
)");
  REQUIRE(r.ok());
  const auto& body = r.ast->units[0].body;
  REQUIRE(body.size() == 5);
  CHECK(body[0].kind == Stmt::Kind::AssertComment);
  CHECK(body[0].anchor_id == 0);
  CHECK(body[2].kind == Stmt::Kind::AssertComment);
  CHECK(body[2].anchor_id == 1);
  CHECK(body[2].assert_name == "mid");
  CHECK(body[4].anchor_id == 2);
  CHECK(r.ast->anchor_count == 3);
}

TEST_CASE("duplicate declarations and duplicate units are errors") {
  ParseResult r1 = parse_text(
      "PROGRAM Main VAR x : INT; x : BOOL; END_VAR x := 1; END_PROGRAM");
  REQUIRE_FALSE(r1.ok());

  ParseResult r2 = parse_text(R"(
PROGRAM Main VAR x : INT; END_VAR x := 1; END_PROGRAM
PROGRAM Main VAR y : INT; END_VAR y := 1; END_PROGRAM
)");
  REQUIRE_FALSE(r2.ok());
}

TEST_CASE("parser recovers and reports multiple errors") {
  ParseResult r = parse_text(R"(
PROGRAM Main
VAR q : BOOL; END_VAR
  q := missing1;
  q := missing2;
END_PROGRAM
)");
  REQUIRE_FALSE(r.ok());
  int errors = 0;
  for (const auto& d : r.diagnostics)
    if (d.severity == Severity::Error) ++errors;
  CHECK(errors >= 2);
}

TEST_CASE("multiple source files share one namespace") {
  ParseResult r = parse({
      SourceUnit{"fb.st", R"(
FUNCTION_BLOCK F
VAR_INPUT in : INT; END_VAR
VAR_OUTPUT out : INT; END_VAR
  out := in;
END_FUNCTION_BLOCK
)"},
      SourceUnit{"main.st", R"(
PROGRAM Main
VAR x : INT; END_VAR
  F(in := 1, out => x);
END_PROGRAM
)"},
  });
  REQUIRE(r.ok());
  CHECK(r.ast->units.size() == 2);
  CHECK(r.tokens.size() == 2);
}

TEST_CASE("FUNCTION units parse and can be called") {
  ParseResult r = parse_text(R"(
FUNCTION Add3
VAR_INPUT v : INT; END_VAR
VAR_OUTPUT r : INT; END_VAR
  r := v + 3;
END_FUNCTION

PROGRAM Main
VAR x : INT; END_VAR
  Add3(v := x, r => x);
END_PROGRAM
)");
  REQUIRE(r.ok());
  CHECK(r.ast->units[0].kind == UnitKind::Function);
}

TEST_CASE("division operator and MOD parse at multiplicative level") {
  ParseResult r = parse_text(
      "PROGRAM Main VAR x : INT; END_VAR x := 1 + x / 2 MOD 3; END_PROGRAM");
  REQUIRE(r.ok());
  const ExprPtr& e = r.ast->units[0].body[0].rhs;
  CHECK(e->bin == BinOp::Add);
  CHECK(e->b->bin == BinOp::Mod);
  CHECK(e->b->a->bin == BinOp::Div);
}

TEST_CASE("comparison operands must agree: BOOL vs numeric") {
  ParseResult r1 = parse_text(
      "PROGRAM Main VAR b, q : BOOL; END_VAR q := b = TRUE; END_PROGRAM");
  REQUIRE(r1.ok());

  ParseResult r2 = parse_text(
      "PROGRAM Main VAR b, q : BOOL; x : INT; END_VAR q := b = x; "
      "END_PROGRAM");
  REQUIRE_FALSE(r2.ok());

  // ordering comparisons are numeric-only
  ParseResult r3 = parse_text(
      "PROGRAM Main VAR b, c, q : BOOL; END_VAR q := b < c; END_PROGRAM");
  REQUIRE_FALSE(r3.ok());

  // INT and DINT compare fine
  ParseResult r4 = parse_text(
      "PROGRAM Main VAR x : INT; y : DINT; q : BOOL; END_VAR q := x < y; "
      "END_PROGRAM");
  REQUIRE(r4.ok());
}

TEST_CASE("arithmetic on BOOL operands is rejected") {
  ParseResult r = parse_text(
      "PROGRAM Main VAR b : BOOL; x : INT; END_VAR x := b + 1; END_PROGRAM");
  REQUIRE_FALSE(r.ok());
}

TEST_CASE("logical operators require BOOL operands") {
  ParseResult r = parse_text(
      "PROGRAM Main VAR x : INT; q : BOOL; END_VAR q := x AND q; "
      "END_PROGRAM");
  REQUIRE_FALSE(r.ok());
}

TEST_CASE("mixed INT and DINT arithmetic widens to DINT") {
  ParseResult r = parse_text(
      "PROGRAM Main VAR x : INT; y : DINT; END_VAR y := x + y; END_PROGRAM");
  REQUIRE(r.ok());
  CHECK(r.ast->units[0].body[0].rhs->type == Scalar::Dint);
}
