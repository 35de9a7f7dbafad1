#pragma once

#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "bbvm/typetag.hpp"

namespace bbvm {

// A node in the typed-shape transition tree. Each shape describes one
// property on top of its parent: its name, the slot it is stored at, and
// the type tag of the values held there (including method identity for
// closure-valued properties). Slot indices along any root path are dense.
struct Shape {
  ShapeId id = kNoShape;
  ShapeId parent = kNoShape;
  std::string propName;  // empty on the root
  uint32_t slotIdx = 0;
  TypeTag propTag;
  uint32_t propCount = 0;  // properties reachable through this shape
  // (name, tag) -> child shape, for O(1) repeated definitions/re-typings
  std::map<std::pair<std::string, std::string>, ShapeId> transitions;
};

struct DuplicateProperty : InternalError {
  explicit DuplicateProperty(const std::string& n)
      : InternalError("property already defined: " + n) {}
};
struct MissingProperty : InternalError {
  explicit MissingProperty(const std::string& n)
      : InternalError("property not present: " + n) {}
};

struct PropInfo {
  uint32_t slot;
  TypeTag tag;
};

class ShapeTable {
 public:
  ShapeTable() {
    Shape root;
    root.id = 0;
    shapes_.push_back(std::move(root));
  }

  ShapeId root() const { return 0; }
  const Shape& at(ShapeId id) const { return shapes_[id]; }
  size_t size() const { return shapes_.size(); }
  uint32_t retype_count() const { return retypes_; }

  // Child shape extending s with a new property. Interned: repeating the
  // same definition returns the identical shape id.
  ShapeId define_property(ShapeId s, const std::string& name, TypeTag tag) {
    if (find(s, name)) throw DuplicateProperty(name);
    return child(s, name, shapes_[s].propCount, tag);
  }

  // Shape identical to s except that one property's tag changes. Layout
  // (slot assignment) is preserved; the result is interned.
  ShapeId update_property_type(ShapeId s, const std::string& name, TypeTag tag) {
    auto info = find(s, name);
    if (!info) throw MissingProperty(name);
    if (info->tag == tag) return s;
    ++retypes_;
    // collect the root path, swap the one tag, rebuild with interning
    std::vector<ShapeId> path;
    for (ShapeId cur = s; cur != 0; cur = shapes_[cur].parent) path.push_back(cur);
    ShapeId rebuilt = 0;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      Shape step = shapes_[*it];  // copy: child() may grow the table
      TypeTag t = step.propName == name ? tag : step.propTag;
      rebuilt = child(rebuilt, step.propName, step.slotIdx, t);
    }
    return rebuilt;
  }

  std::optional<PropInfo> lookup(ShapeId s, const std::string& name) const {
    return find(s, name);
  }

  // One step of a property write: returns the shape the object ends up
  // with (possibly s itself) and the slot to store into.
  struct WritePlan {
    ShapeId target;
    uint32_t slot;
    bool grows;  // object needs one more slot
  };
  WritePlan plan_write(ShapeId s, const std::string& name, TypeTag tag) {
    auto info = find(s, name);
    if (!info) {
      ShapeId t = define_property(s, name, tag);
      return WritePlan{t, shapes_[t].slotIdx, true};
    }
    if (info->tag == tag) return WritePlan{s, info->slot, false};
    ShapeId t = update_property_type(s, name, tag);
    return WritePlan{t, info->slot, false};
  }

  // Deterministic dump of the transition tree, used by golden tests.
  std::string dump() const {
    std::ostringstream os;
    dump_rec(os, 0, 0);
    return os.str();
  }

 private:
  std::vector<Shape> shapes_;
  // structural interning: (parent, name, slot, tagname) -> id
  std::unordered_map<std::string, ShapeId> intern_;
  uint32_t retypes_ = 0;

  std::optional<PropInfo> find(ShapeId s, const std::string& name) const {
    for (ShapeId cur = s; cur != 0; cur = shapes_[cur].parent) {
      const Shape& sh = shapes_[cur];
      if (sh.propName == name) return PropInfo{sh.slotIdx, sh.propTag};
    }
    return std::nullopt;
  }

  ShapeId child(ShapeId parent, const std::string& name, uint32_t slot, TypeTag tag) {
    std::string key = std::to_string(parent) + "|" + name + "|" +
                      std::to_string(slot) + "|" + tag_name(tag);
    auto it = intern_.find(key);
    if (it != intern_.end()) return it->second;
    Shape sh;
    sh.id = (ShapeId)shapes_.size();
    sh.parent = parent;
    sh.propName = name;
    sh.slotIdx = slot;
    sh.propTag = tag;
    sh.propCount = std::max(shapes_[parent].propCount, slot + 1);
    shapes_.push_back(sh);
    intern_.emplace(std::move(key), sh.id);
    shapes_[parent].transitions[{name, tag_name(tag)}] = sh.id;
    return sh.id;
  }

  void dump_rec(std::ostringstream& os, ShapeId id, int depth) const {
    const Shape& s = shapes_[id];
    os << std::string((size_t)depth * 2, ' ');
    if (id == 0) {
      os << "S0 (root)\n";
    } else {
      os << "S" << id << " " << s.propName << ": " << tag_name(s.propTag)
         << " @slot" << s.slotIdx << "\n";
    }
    for (const auto& [k, c] : s.transitions) dump_rec(os, c, depth + 1);
  }
};

}  // namespace bbvm
