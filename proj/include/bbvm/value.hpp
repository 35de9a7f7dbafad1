#pragma once

#include <charconv>
#include <cmath>
#include <cstring>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "bbvm/ir.hpp"
#include "bbvm/typetag.hpp"

namespace bbvm {

enum class ValKind : uint8_t { Int32, Float64, Null, Const, String, Array, Closure, Object };
enum class ConstVal : uint8_t { True, False, Undefined };

struct Value {
  ValKind kind = ValKind::Const;
  union {
    int32_t i;
    double f;
    ConstVal c;
    uint32_t ref;  // string/array/object handle, or closure FuncId
  };

  Value() : c(ConstVal::Undefined) {}

  static Value int32(int32_t v) { Value x; x.kind = ValKind::Int32; x.i = v; return x; }
  static Value float64(double v) { Value x; x.kind = ValKind::Float64; x.f = v; return x; }
  static Value null() { Value x; x.kind = ValKind::Null; x.c = ConstVal::Undefined; return x; }
  static Value boolean(bool b) {
    Value x;
    x.kind = ValKind::Const;
    x.c = b ? ConstVal::True : ConstVal::False;
    return x;
  }
  static Value undefined() { return Value(); }
  static Value string(uint32_t id) { Value x; x.kind = ValKind::String; x.ref = id; return x; }
  static Value array(uint32_t id) { Value x; x.kind = ValKind::Array; x.ref = id; return x; }
  static Value object(uint32_t id) { Value x; x.kind = ValKind::Object; x.ref = id; return x; }
  static Value closure(FuncId f) { Value x; x.kind = ValKind::Closure; x.ref = f; return x; }

  bool is_true() const { return kind == ValKind::Const && c == ConstVal::True; }
  bool is_false() const { return kind == ValKind::Const && c == ConstVal::False; }
};

// Runtime tag of a value, as a lattice element. Closures always carry
// their identity at run time.
inline TypeTag runtime_tag(const Value& v) {
  switch (v.kind) {
    case ValKind::Int32: return TypeTag::int32();
    case ValKind::Float64: return TypeTag::float64();
    case ValKind::Null: return TypeTag::null();
    case ValKind::Const: return TypeTag::constant();
    case ValKind::String: return TypeTag::string();
    case ValKind::Array: return TypeTag::array();
    case ValKind::Closure: return TypeTag::closure(v.ref);
    case ValKind::Object: return TypeTag::object();
  }
  return TypeTag::unknown();
}

struct HeapObject {
  ShapeId shape = 0;
  std::vector<Value> slots;
};

struct HeapArray {
  std::vector<Value> elems;
};

// Arena heap: objects live until the VM instance is destroyed. Strings are
// immutable and interned so equality is handle equality.
class Heap {
 public:
  uint32_t new_object() {
    objects_.emplace_back();
    return (uint32_t)(objects_.size() - 1);
  }
  uint32_t new_array(uint32_t reserve) {
    arrays_.emplace_back();
    arrays_.back().elems.reserve(reserve);
    return (uint32_t)(arrays_.size() - 1);
  }
  HeapObject& object(uint32_t id) { return objects_[id]; }
  const HeapObject& object(uint32_t id) const { return objects_[id]; }
  HeapArray& array(uint32_t id) { return arrays_[id]; }

  uint32_t intern(const std::string& s) {
    auto it = stringIds_.find(s);
    if (it != stringIds_.end()) return it->second;
    uint32_t id = (uint32_t)strings_.size();
    strings_.push_back(s);
    stringIds_.emplace(s, id);
    return id;
  }
  const std::string& str(uint32_t id) const { return strings_[id]; }

 private:
  std::deque<HeapObject> objects_;
  std::deque<HeapArray> arrays_;
  std::vector<std::string> strings_;
  std::unordered_map<std::string, uint32_t> stringIds_;
};

// --- numeric formatting shared by the VM and the reference interpreter ---

inline std::string number_text(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  if (v == 0) return "0";
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    long long n = (long long)v;
    return std::to_string(n);
  }
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

// --- checked int32 arithmetic used by overflow tests ---

inline bool add_i32(int32_t a, int32_t b, int32_t* out) {
  return !__builtin_add_overflow(a, b, out);
}
inline bool sub_i32(int32_t a, int32_t b, int32_t* out) {
  return !__builtin_sub_overflow(a, b, out);
}
inline bool mul_i32(int32_t a, int32_t b, int32_t* out) {
  return !__builtin_mul_overflow(a, b, out);
}
// Exact integer division; false routes to the float64 arm.
inline bool div_i32(int32_t a, int32_t b, int32_t* out) {
  if (b == 0) return false;
  if (a == INT32_MIN && b == -1) return false;
  if (a % b != 0) return false;
  *out = a / b;
  return true;
}
// false = modulo by zero (halts)
inline bool mod_i32(int32_t a, int32_t b, int32_t* out) {
  if (b == 0) return false;
  if (b == -1) {
    *out = 0;
    return true;
  }
  *out = a % b;
  return true;
}

inline bool cmp_i32(CmpKind k, int32_t a, int32_t b) {
  switch (k) {
    case CmpKind::Eq: return a == b;
    case CmpKind::Ne: return a != b;
    case CmpKind::Lt: return a < b;
    case CmpKind::Le: return a <= b;
    case CmpKind::Gt: return a > b;
    case CmpKind::Ge: return a >= b;
  }
  return false;
}

inline bool cmp_f64(CmpKind k, double a, double b) {
  switch (k) {
    case CmpKind::Eq: return a == b;
    case CmpKind::Ne: return a != b;
    case CmpKind::Lt: return a < b;
    case CmpKind::Le: return a <= b;
    case CmpKind::Gt: return a > b;
    case CmpKind::Ge: return a >= b;
  }
  return false;
}

}  // namespace bbvm
