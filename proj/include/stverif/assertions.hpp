#pragma once
// Turns //#ASSERT comments into typed assertion directives. The parser has
// already anchored each comment at a statement boundary as an AssertComment
// pseudo-statement; this pass parses the expression text in the enclosing
// unit's scope and checks it is BOOL.
#include <string>
#include <vector>

#include "stverif/ast.hpp"
#include "stverif/parser.hpp"

namespace stverif {

struct ExtractResult {
  std::vector<AssertionDirective> directives;  // in source order
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return !has_errors(diagnostics); }
};

namespace detail {

inline void collect_anchors(const Unit& unit, const std::vector<Stmt>& body,
                            std::vector<AssertionDirective>& out) {
  for (const Stmt& s : body) {
    switch (s.kind) {
      case Stmt::Kind::AssertComment: {
        AssertionDirective d;
        d.name = s.assert_name;
        d.expression_text = s.assert_text;
        d.span = s.span;
        d.anchor_id = s.anchor_id;
        d.unit = unit.name;
        out.push_back(std::move(d));
        break;
      }
      case Stmt::Kind::If:
        for (const auto& arm : s.arms) collect_anchors(unit, arm.body, out);
        collect_anchors(unit, s.else_body, out);
        break;
      case Stmt::Kind::Case:
        for (const auto& br : s.branches) collect_anchors(unit, br.body, out);
        collect_anchors(unit, s.else_body, out);
        break;
      case Stmt::Kind::For:
      case Stmt::Kind::While:
      case Stmt::Kind::Repeat:
        collect_anchors(unit, s.body, out);
        break;
      default:
        break;
    }
  }
}

}  // namespace detail

// tokens: per-file token streams from parse(); ast: the parsed program.
// Every //#ASSERT comment must have landed at a statement boundary; a stray
// one (declaration section, outside units) is an error.
inline ExtractResult extract_assertions(
    const std::vector<std::vector<Token>>& tokens, const TypedAst& ast) {
  ExtractResult res;

  std::vector<AssertionDirective> anchors;
  for (const Unit& u : ast.units) detail::collect_anchors(u, u.body, anchors);

  // match comment tokens against anchored spans
  for (const auto& file_toks : tokens) {
    for (const Token& t : file_toks) {
      if (t.kind != TokenKind::Comment) continue;
      if (!detail::starts_with_assert_prefix(t.lexeme)) continue;
      bool anchored = false;
      for (const AssertionDirective& d : anchors)
        if (d.span == t.span) anchored = true;
      if (!anchored)
        res.diagnostics.push_back(Diagnostic{
            Severity::Error,
            "assertion comment is not at a statement boundary", t.span});
    }
  }

  for (AssertionDirective& d : anchors) {
    const Unit* u = ast.find_unit(d.unit);
    if (!u) continue;
    detail::AssertCommentParts parts;  // recompute text offset for spans
    {
      // span of the expression text inside the comment
      parts.text_offset = d.span.hi - d.span.lo >= d.expression_text.size()
                              ? static_cast<uint32_t>(
                                    (d.span.hi - d.span.lo) -
                                    d.expression_text.size())
                              : 0;
    }
    Span base{d.span.file, d.span.lo + parts.text_offset, d.span.hi};
    size_t before = res.diagnostics.size();
    d.expr = parse_expr_in_scope(*u, d.expression_text, base, res.diagnostics);
    if (!d.expr) {
      if (res.diagnostics.size() == before)
        res.diagnostics.push_back(Diagnostic{
            Severity::Error, "assertion expression failed to parse", d.span});
      continue;
    }
    if (d.expr->type != Scalar::Bool) {
      res.diagnostics.push_back(Diagnostic{
          Severity::Error,
          "assertion expression must be BOOL, got " +
              std::string(scalar_name(d.expr->type)),
          d.span});
      d.expr = nullptr;
    }
  }

  res.directives = std::move(anchors);
  return res;
}

}  // namespace stverif
