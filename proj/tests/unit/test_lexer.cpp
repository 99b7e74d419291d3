#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "stverif/lexer.hpp"

using namespace stverif;

namespace {

LexResult lex(const std::string& text) {
  SourceUnit src{"test.st", text};
  return tokenize(src);
}

// Drops the trailing EndOfFile token for easier positional checks.
std::vector<Token> lex_body(const std::string& text) {
  LexResult r = lex(text);
  REQUIRE(!has_errors(r.diagnostics));
  REQUIRE(!r.tokens.empty());
  REQUIRE(r.tokens.back().kind == TokenKind::EndOfFile);
  r.tokens.pop_back();
  return r.tokens;
}

}  // namespace

TEST_CASE("assignment statement tokens") {
  auto toks = lex_body("x := 1;");
  REQUIRE(toks.size() == 4);
  CHECK(toks[0].kind == TokenKind::Identifier);
  CHECK(toks[0].lexeme == "x");
  CHECK(toks[1].kind == TokenKind::Operator);
  CHECK(toks[1].lexeme == ":=");
  CHECK(toks[2].kind == TokenKind::IntLiteral);
  CHECK(toks[2].int_value == 1);
  CHECK(toks[3].kind == TokenKind::Punct);
  CHECK(toks[3].lexeme == ";");
}

TEST_CASE("assertion comment is one comment token") {
  auto toks = lex_body("//#ASSERT On<>Off");
  REQUIRE(toks.size() == 1);
  CHECK(toks[0].kind == TokenKind::Comment);
  CHECK(toks[0].lexeme == "//#ASSERT On<>Off");
}

TEST_CASE("keywords are case-insensitive, identifiers keep case") {
  auto toks = lex_body("If tHen end_if MyVar myvar");
  REQUIRE(toks.size() == 5);
  CHECK(toks[0].kind == TokenKind::Keyword);
  CHECK(toks[1].kind == TokenKind::Keyword);
  CHECK(toks[2].kind == TokenKind::Keyword);
  CHECK(toks[3].kind == TokenKind::Identifier);
  CHECK(toks[3].lexeme == "MyVar");
  CHECK(toks[4].lexeme == "myvar");
}

TEST_CASE("hex literal") {
  auto toks = lex_body("16#FF");
  REQUIRE(toks.size() == 1);
  CHECK(toks[0].kind == TokenKind::IntLiteral);
  CHECK(toks[0].int_value == 255);
}

TEST_CASE("malformed hex literal produces error diagnostic") {
  LexResult r = lex("16#ZZ");
  CHECK(has_errors(r.diagnostics));
}

TEST_CASE("boolean literals") {
  auto toks = lex_body("TRUE false");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].kind == TokenKind::BoolLiteral);
  CHECK(toks[0].int_value == 1);
  CHECK(toks[1].kind == TokenKind::BoolLiteral);
  CHECK(toks[1].int_value == 0);
}

TEST_CASE("two-char operators win over one-char prefixes") {
  auto toks = lex_body(":= <= >= <> => .. < > =");
  std::vector<std::string> want = {":=", "<=", ">=", "<>",
                                   "=>", "..", "<",  ">", "="};
  REQUIRE(toks.size() == want.size());
  for (size_t i = 0; i < want.size(); ++i) CHECK(toks[i].lexeme == want[i]);
}

TEST_CASE("block comments retained and may span lines") {
  auto toks = lex_body("a (* multi\nline *) b");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0].lexeme == "a");
  CHECK(toks[1].kind == TokenKind::Comment);
  CHECK(toks[2].lexeme == "b");
}

TEST_CASE("unterminated block comment is an error") {
  LexResult r = lex("a (* never closed");
  CHECK(has_errors(r.diagnostics));
}

TEST_CASE("unknown character produces error, lexing continues") {
  LexResult r = lex("a ? b");
  CHECK(has_errors(r.diagnostics));
  int idents = 0;
  for (const auto& t : r.tokens)
    if (t.kind == TokenKind::Identifier) ++idents;
  CHECK(idents == 2);
}

TEST_CASE("integer literal overflow is an error") {
  LexResult r = lex("99999999999");
  CHECK(has_errors(r.diagnostics));
}

TEST_CASE("token spans reconstruct the source text") {
  // Whitespace is the only dropped content, so concatenating the span
  // substrings with single separators must preserve every token lexeme
  // and relative order.
  std::string text =
      "PROGRAM P\nVAR x : INT := 3; END_VAR\n"
      "(* note *) x := x + 16#10; //#ASSERT x > 0\nEND_PROGRAM";
  SourceUnit src{"t.st", text};
  LexResult r = tokenize(src);
  REQUIRE(!has_errors(r.diagnostics));
  uint32_t prev_end = 0;
  for (const Token& t : r.tokens) {
    if (t.kind == TokenKind::EndOfFile) break;
    REQUIRE(t.span.lo >= prev_end);
    REQUIRE(t.span.hi <= text.size());
    CHECK(text.substr(t.span.lo, t.span.hi - t.span.lo) == t.lexeme);
    // gaps hold only whitespace
    for (uint32_t i = prev_end; i < t.span.lo; ++i)
      CHECK(std::isspace(static_cast<unsigned char>(text[i])));
    prev_end = t.span.hi;
  }
}

TEST_CASE("seeded random token streams round-trip") {
  std::mt19937 rng(20260817);
  const char* pieces[] = {"IF",   "THEN", "x",  "y2", ":=", "+",  "(*c*)",
                          "1234", "16#A", ";",  "<>", "(",  ")",  "TRUE",
                          "//#ASSERT x>1\n", "MOD", "..", "[",  "]"};
  for (int iter = 0; iter < 50; ++iter) {
    std::string text;
    int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      text += pieces[rng() % std::size(pieces)];
      text += (rng() % 3) ? " " : "\n";
    }
    SourceUnit src{"fuzz.st", text};
    LexResult r = tokenize(src);
    REQUIRE(!has_errors(r.diagnostics));
    for (const Token& t : r.tokens) {
      if (t.kind == TokenKind::EndOfFile) break;
      std::string from_span = text.substr(t.span.lo, t.span.hi - t.span.lo);
      // line comments end at the newline; lexeme excludes it
      CHECK(from_span == t.lexeme);
    }
  }
}
