#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bbvm/common.hpp"

namespace bbvm {

using ShapeId = uint32_t;
inline constexpr ShapeId kNoShape = 0xffffffff;

// The first-degree type lattice driving code versioning. ClosureKnown
// carries the identity of the function; Unknown is the lattice top.
enum class TagKind : uint8_t {
  Int32, Float64, Null, Const, String, Array,
  ClosureKnown, ClosureUnknown, Object, Unknown,
};

struct TypeTag {
  TagKind kind = TagKind::Unknown;
  FuncId fn = kNoFunc;  // valid iff kind == ClosureKnown

  static TypeTag int32() { return {TagKind::Int32, kNoFunc}; }
  static TypeTag float64() { return {TagKind::Float64, kNoFunc}; }
  static TypeTag null() { return {TagKind::Null, kNoFunc}; }
  static TypeTag constant() { return {TagKind::Const, kNoFunc}; }
  static TypeTag string() { return {TagKind::String, kNoFunc}; }
  static TypeTag array() { return {TagKind::Array, kNoFunc}; }
  static TypeTag closure(FuncId f) { return {TagKind::ClosureKnown, f}; }
  static TypeTag closure_unknown() { return {TagKind::ClosureUnknown, kNoFunc}; }
  static TypeTag object() { return {TagKind::Object, kNoFunc}; }
  static TypeTag unknown() { return {TagKind::Unknown, kNoFunc}; }

  bool operator==(const TypeTag& o) const { return kind == o.kind && fn == o.fn; }
  bool operator!=(const TypeTag& o) const { return !(*this == o); }
  bool is_unknown() const { return kind == TagKind::Unknown; }
  bool is_closure() const {
    return kind == TagKind::ClosureKnown || kind == TagKind::ClosureUnknown;
  }
  // may this tag carry a shape in a context entry
  bool shapeable() const {
    return kind == TagKind::Object || kind == TagKind::Array || is_closure();
  }
};

// Serialized tag names follow the runtime's stats schema: known closures
// print as closure/idN, the identity-free closure tag prints as closure.
inline std::string tag_name(const TypeTag& t) {
  switch (t.kind) {
    case TagKind::Int32: return "int32";
    case TagKind::Float64: return "float64";
    case TagKind::Null: return "null";
    case TagKind::Const: return "const";
    case TagKind::String: return "string";
    case TagKind::Array: return "array";
    case TagKind::ClosureKnown: return "closure/id" + std::to_string(t.fn);
    case TagKind::ClosureUnknown: return "closure";
    case TagKind::Object: return "object";
    case TagKind::Unknown: return "unknown";
  }
  return "?";
}

inline TypeTag join(const TypeTag& a, const TypeTag& b) {
  if (a == b) return a;
  if (a.is_closure() && b.is_closure()) return TypeTag::closure_unknown();
  return TypeTag::unknown();
}

// true when `narrow` is less-or-equally precise information than `wide`
// (i.e. narrow <= wide in the lattice).
inline bool tag_leq(const TypeTag& narrow, const TypeTag& wide) {
  if (wide.is_unknown()) return true;
  if (narrow == wide) return true;
  if (wide.kind == TagKind::ClosureUnknown && narrow.kind == TagKind::ClosureKnown)
    return true;
  return false;
}

struct CtxEntry {
  TypeTag tag;
  ShapeId shape = kNoShape;  // meaningful only for shapeable tags

  bool operator==(const CtxEntry& o) const { return tag == o.tag && shape == o.shape; }
};

struct RefineConflict : InternalError {
  explicit RefineConflict(const std::string& m) : InternalError("refine conflict: " + m) {}
};

// Map from live value ids to what is known about them. Absent entry means
// unknown. Entries never hold Unknown tags with no shape; refine() and
// set() drop those instead of storing them.
class TypeContext {
 public:
  using Map = std::map<uint32_t, CtxEntry>;  // ordered: keys are canonical

  bool empty() const { return m_.empty(); }
  size_t size() const { return m_.size(); }
  const Map& entries() const { return m_; }

  std::optional<CtxEntry> get(uint32_t value) const {
    auto it = m_.find(value);
    if (it == m_.end()) return std::nullopt;
    return it->second;
  }

  TypeTag tag_of(uint32_t value) const {
    auto e = get(value);
    return e ? e->tag : TypeTag::unknown();
  }

  ShapeId shape_of(uint32_t value) const {
    auto e = get(value);
    return e ? e->shape : kNoShape;
  }

  // Unchecked write: installs exactly this knowledge (used when a value is
  // freshly defined). Unknown tag without shape erases the entry.
  void set(uint32_t value, TypeTag tag, ShapeId shape = kNoShape) {
    if (!tag.shapeable()) shape = kNoShape;
    if (tag.is_unknown()) {
      m_.erase(value);
      return;
    }
    m_[value] = CtxEntry{tag, shape};
  }

  void drop(uint32_t value) { m_.erase(value); }

  void drop_shape(uint32_t value) {
    auto it = m_.find(value);
    if (it != m_.end()) it->second.shape = kNoShape;
  }

  // Narrowing update. Never widens; conflicting knowledge is a compiler bug.
  TypeContext refined(uint32_t value, TypeTag tag, ShapeId shape = kNoShape) const {
    TypeContext out = *this;
    auto it = out.m_.find(value);
    if (it == out.m_.end()) {
      out.set(value, tag, shape);
      return out;
    }
    CtxEntry& e = it->second;
    if (!tag_leq(tag, e.tag))
      throw RefineConflict("value v" + std::to_string(value) + ": have " +
                           tag_name(e.tag) + ", refining to " + tag_name(tag));
    e.tag = tag;
    if (!tag.shapeable()) e.shape = kNoShape;
    else if (shape != kNoShape) e.shape = shape;
    return out;
  }

  // Keep only entries for the given (sorted) live set.
  TypeContext restricted(const std::vector<uint32_t>& live) const {
    TypeContext out;
    for (const auto& [k, v] : m_)
      if (std::binary_search(live.begin(), live.end(), k)) out.m_[k] = v;
    return out;
  }

  // Shape knowledge only; tags survive. Used at escape points.
  void drop_all_shapes() {
    for (auto& [k, v] : m_) v.shape = kNoShape;
  }

  bool operator==(const TypeContext& o) const { return m_ == o.m_; }

  // Canonical byte encoding; equality of keys <=> equality of contexts.
  std::string key() const {
    std::string k;
    k.reserve(m_.size() * 13);
    for (const auto& [val, e] : m_) {
      append32(k, val);
      k.push_back((char)e.tag.kind);
      append32(k, e.tag.fn);
      append32(k, e.shape);
    }
    return k;
  }

  std::string describe_tags() const {
    std::string s = "{";
    bool first = true;
    for (const auto& [val, e] : m_) {
      if (!first) s += ", ";
      first = false;
      s += "v" + std::to_string(val) + ":" + tag_name(e.tag);
      if (e.shape != kNoShape) s += "@S" + std::to_string(e.shape);
    }
    return s + "}";
  }

 private:
  static void append32(std::string& k, uint32_t v) {
    k.push_back((char)(v & 0xff));
    k.push_back((char)((v >> 8) & 0xff));
    k.push_back((char)((v >> 16) & 0xff));
    k.push_back((char)((v >> 24) & 0xff));
  }

  Map m_;
};

using ContextKey = std::string;

}  // namespace bbvm
