#pragma once
// Interned identifier names. Interning happens while parsing and building
// models; evaluation-time lookups are plain array indexing on the id.
#include <cstdint>
#include <deque>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stverif {

class Symbol {
 public:
  Symbol() = default;

  static Symbol intern(std::string_view name) {
    Table& t = table();
    std::lock_guard<std::mutex> lock(t.mutex);
    auto it = t.ids.find(std::string(name));
    if (it != t.ids.end()) return Symbol(it->second);
    uint32_t id = static_cast<uint32_t>(t.names.size());
    t.names.emplace_back(name);
    t.ids.emplace(t.names.back(), id);
    return Symbol(id);
  }

  // Number of distinct symbols interned so far; ids are < count().
  static uint32_t count() {
    Table& t = table();
    std::lock_guard<std::mutex> lock(t.mutex);
    return static_cast<uint32_t>(t.names.size());
  }

  std::string_view str() const {
    if (!valid()) return "<none>";
    Table& t = table();
    std::lock_guard<std::mutex> lock(t.mutex);
    return t.names[id_];
  }

  uint32_t id() const { return id_; }
  bool valid() const { return id_ != UINT32_MAX; }

  friend bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }
  friend bool operator!=(Symbol a, Symbol b) { return a.id_ != b.id_; }
  friend bool operator<(Symbol a, Symbol b) { return a.id_ < b.id_; }

 private:
  explicit Symbol(uint32_t id) : id_(id) {}

  struct Table {
    std::mutex mutex;
    std::deque<std::string> names;  // deque keeps string_views stable
    std::unordered_map<std::string, uint32_t> ids;
  };
  static Table& table() {
    static Table t;
    return t;
  }

  uint32_t id_ = UINT32_MAX;
};

struct SymbolHash {
  size_t operator()(Symbol s) const { return std::hash<uint32_t>()(s.id()); }
};

}  // namespace stverif
