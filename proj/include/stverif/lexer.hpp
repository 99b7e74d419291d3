#pragma once
// Lexer for the Structured Text subset. Comments are kept as tokens so
// assertion directives can be recovered afterwards; the token stream plus
// skipped whitespace reconstructs the input exactly.
#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stverif/diag.hpp"

namespace stverif {

enum class TokenKind : uint8_t {
  Keyword,
  Identifier,
  IntLiteral,
  BoolLiteral,
  Operator,
  Punct,
  Comment,
  EndOfFile
};

struct Token {
  TokenKind kind = TokenKind::EndOfFile;
  std::string lexeme;
  Span span;
  int64_t int_value = 0;  // IntLiteral: decoded value; BoolLiteral: 0/1

  bool is(TokenKind k) const { return kind == k; }
};

namespace detail {

inline std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return out;
}

inline bool is_keyword(const std::string& up) {
  static const char* kws[] = {
      "PROGRAM", "END_PROGRAM", "FUNCTION_BLOCK", "END_FUNCTION_BLOCK",
      "FUNCTION", "END_FUNCTION", "VAR_INPUT", "VAR_OUTPUT", "VAR",
      "VAR_TEMP", "CONSTANT", "END_VAR", "IF", "THEN", "ELSIF", "ELSE",
      "END_IF", "CASE", "OF", "END_CASE", "FOR", "TO", "BY", "DO", "END_FOR",
      "WHILE", "END_WHILE", "REPEAT", "UNTIL", "END_REPEAT", "EXIT", "RETURN",
      "AND", "OR", "XOR", "NOT", "MOD", "BOOL", "INT", "DINT", "ARRAY"};
  for (const char* k : kws)
    if (up == k) return true;
  return false;
}

}  // namespace detail

struct LexResult {
  std::vector<Token> tokens;  // includes comments and a final EndOfFile
  std::vector<Diagnostic> diagnostics;
};

// `file` is the index of `unit` in the job's source list and is recorded in
// every span.
inline LexResult tokenize(const SourceUnit& unit, int32_t file = 0) {
  LexResult res;
  const std::string& s = unit.text;
  const uint32_t n = static_cast<uint32_t>(s.size());
  uint32_t i = 0;

  auto span_from = [&](uint32_t lo) { return Span{file, lo, i}; };
  auto push = [&](TokenKind k, uint32_t lo, int64_t val = 0) {
    res.tokens.push_back(
        Token{k, s.substr(lo, i - lo), span_from(lo), val});
  };
  auto error = [&](uint32_t lo, std::string msg) {
    res.diagnostics.push_back(
        Diagnostic{Severity::Error, std::move(msg), span_from(lo)});
  };

  while (i < n) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    uint32_t lo = i;

    // line comment
    if (c == '/' && i + 1 < n && s[i + 1] == '/') {
      while (i < n && s[i] != '\n') ++i;
      push(TokenKind::Comment, lo);
      continue;
    }
    // block comment (* ... *)
    if (c == '(' && i + 1 < n && s[i + 1] == '*') {
      i += 2;
      bool closed = false;
      while (i < n) {
        if (s[i] == '*' && i + 1 < n && s[i + 1] == ')') {
          i += 2;
          closed = true;
          break;
        }
        ++i;
      }
      if (!closed) {
        error(lo, "unterminated block comment");
        continue;
      }
      push(TokenKind::Comment, lo);
      continue;
    }

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < n && (std::isalnum(static_cast<unsigned char>(s[i])) ||
                       s[i] == '_'))
        ++i;
      std::string up = detail::upper(std::string_view(s).substr(lo, i - lo));
      if (up == "TRUE" || up == "FALSE") {
        push(TokenKind::BoolLiteral, lo, up == "TRUE" ? 1 : 0);
      } else if (detail::is_keyword(up)) {
        push(TokenKind::Keyword, lo);
      } else {
        push(TokenKind::Identifier, lo);
      }
      continue;
    }

    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < n && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      // 16#... hexadecimal
      if (i < n && s[i] == '#') {
        std::string base = s.substr(lo, i - lo);
        ++i;
        uint32_t digits_lo = i;
        while (i < n && std::isalnum(static_cast<unsigned char>(s[i]))) ++i;
        std::string digits = s.substr(digits_lo, i - digits_lo);
        if (base != "16") {
          error(lo, "unsupported literal base '" + base + "#'");
          continue;
        }
        if (digits.empty() ||
            digits.find_first_not_of("0123456789abcdefABCDEF") !=
                std::string::npos) {
          error(lo, "malformed hexadecimal literal '" + s.substr(lo, i - lo) +
                        "'");
          continue;
        }
        // hex literals denote a 32-bit pattern: 16#FFFFFFFF reads as -1
        int64_t v = 0;
        bool overflow = false;
        for (char d : digits) {
          v = v * 16 + (std::isdigit(static_cast<unsigned char>(d))
                            ? d - '0'
                            : std::toupper(d) - 'A' + 10);
          if (v > static_cast<int64_t>(UINT32_MAX)) {
            overflow = true;
            break;
          }
        }
        if (overflow) {
          error(lo, "integer literal out of range");
          continue;
        }
        push(TokenKind::IntLiteral, lo,
             static_cast<int32_t>(static_cast<uint32_t>(v)));
        continue;
      }
      // magnitude 2^31 is allowed so the parser can fold -2147483648;
      // unnegated use of that value is rejected there
      int64_t v = 0;
      bool overflow = false;
      for (uint32_t k = lo; k < i; ++k) {
        v = v * 10 + (s[k] - '0');
        if (v > static_cast<int64_t>(INT32_MAX) + 1) {
          overflow = true;
          break;
        }
      }
      if (overflow) {
        error(lo, "integer literal out of range");
        continue;
      }
      push(TokenKind::IntLiteral, lo, v);
      continue;
    }

    // multi-character operators first
    auto two = [&](char a, char b) {
      return c == a && i + 1 < n && s[i + 1] == b;
    };
    if (two(':', '=') || two('<', '=') || two('>', '=') || two('<', '>') ||
        two('=', '>') || two('.', '.')) {
      i += 2;
      push(TokenKind::Operator, lo);
      continue;
    }
    if (c == '=' || c == '<' || c == '>' || c == '+' || c == '-' ||
        c == '*' || c == '/') {
      ++i;
      push(TokenKind::Operator, lo);
      continue;
    }
    if (c == ';' || c == ':' || c == ',' || c == '(' || c == ')' ||
        c == '[' || c == ']' || c == '.') {
      ++i;
      push(TokenKind::Punct, lo);
      continue;
    }

    ++i;
    error(lo, std::string("unexpected character '") + c + "'");
  }

  res.tokens.push_back(Token{TokenKind::EndOfFile, "", Span{file, n, n}, 0});
  return res;
}

}  // namespace stverif
