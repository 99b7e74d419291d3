#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace stverif {

// Half-open byte range [lo, hi) in the text of source file `file`
// (index into the job's source unit list).
struct Span {
  int32_t file = 0;
  uint32_t lo = 0;
  uint32_t hi = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  Span span;
};

struct SourceUnit {
  std::string path;
  std::string text;
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    if (d.severity == Severity::Error) return true;
  return false;
}

inline std::string format_diagnostic(const Diagnostic& d,
                                     const std::vector<SourceUnit>& units) {
  std::string out;
  if (d.span.file >= 0 && d.span.file < static_cast<int32_t>(units.size())) {
    const SourceUnit& u = units[d.span.file];
    // Derive 1-based line number from the byte offset.
    uint32_t line = 1;
    for (uint32_t i = 0; i < d.span.lo && i < u.text.size(); ++i)
      if (u.text[i] == '\n') ++line;
    out += u.path + ":" + std::to_string(line) + ": ";
  }
  out += d.severity == Severity::Error ? "error: " : "warning: ";
  out += d.message;
  return out;
}

}  // namespace stverif
