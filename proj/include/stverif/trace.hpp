#pragma once
// Counterexample traces at scan-cycle granularity: per cycle, the inputs
// chosen at cycle start and the end-of-cycle valuation of every persistent
// variable (array elements flattened as name[i]).
#include <cstdint>
#include <string>
#include <vector>

#include "stverif/eval.hpp"

namespace stverif {

struct CycleRecord {
  // declaration order, exactly the input-kind variables
  std::vector<std::pair<Symbol, int32_t>> inputs;
  // declaration order, persistent variables and array elements
  std::vector<std::pair<std::string, int32_t>> end_values;

  bool operator==(const CycleRecord&) const = default;
};

struct Violation {
  int cycle = -1;        // 1-based
  int location_id = -1;  // anchor location or end-of-cycle
  int anchor_id = -1;    // -1 for end-of-cycle properties
  bool fault = false;
  std::string detail;    // violated expression text or fault description
  Span span;

  bool operator==(const Violation&) const = default;
};

struct Trace {
  std::vector<CycleRecord> cycles;
  Violation violation;

  bool operator==(const Trace&) const = default;
};

// Persistent valuation rendered with stable names, for trace records.
inline std::vector<std::pair<std::string, int32_t>> persistent_valuation(
    const Store& s) {
  std::vector<std::pair<std::string, int32_t>> out;
  for (const Layout::Slot& slot : s.layout().slots()) {
    if (slot.kind == VarKind::Temp) continue;
    if (!slot.type.array) {
      out.emplace_back(std::string(slot.name.str()),
                       s.values()[slot.offset]);
    } else {
      for (int64_t i = slot.type.lo; i <= slot.type.hi; ++i)
        out.emplace_back(std::string(slot.name.str()) + "[" +
                             std::to_string(i) + "]",
                         s.values()[slot.offset +
                                    static_cast<uint32_t>(i - slot.type.lo)]);
    }
  }
  return out;
}

}  // namespace stverif
