#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "bbvm/common.hpp"
#include "bbvm/typetag.hpp"

namespace bbvm {

enum class Op : uint8_t {
  ConstInt, ConstFloat, ConstStr, ConstBool, ConstUndef, ConstNull,
  MakeClosure, Move,
  // int32 arithmetic; these appear only as the payload of an OverflowTest
  AddI32, SubI32, MulI32, DivI32, ModI32,
  AddF64, SubF64, MulF64, DivF64,
  CmpI32, CmpF64, CmpRef, StrEq, StrConcat, I32toF64,
  AllocObject, AllocArray, ArrayRead, ArrayWrite, ArrayLen,
  GetGlobal, SetGlobal,
  // slot ops appear only in specialized code, after a shape is resolved
  ReadSlot, WriteSlot, ShapeUpdate,
};

enum class CmpKind : uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

struct Instr {
  Op op;
  RegId dst = kNoReg;
  RegId a = kNoReg;
  RegId b = kNoReg;
  RegId c = kNoReg;      // ArrayWrite value
  int32_t imm = 0;       // ConstInt payload, CmpKind, slot index, bool payload
  double fimm = 0.0;     // ConstFloat payload
  uint32_t sym = 0;      // string id / global id / function id / shape id / array size
};

// Runtime tag classes a TagTest can probe for. Closure identity is not a
// runtime class; a closure probe refines the context to closure-unknown.
enum class TagClass : uint8_t { Int32, Float64, Null, Const, String, Array, Closure, Object };

inline const char* tag_class_name(TagClass c) {
  switch (c) {
    case TagClass::Int32: return "int32";
    case TagClass::Float64: return "float64";
    case TagClass::Null: return "null";
    case TagClass::Const: return "const";
    case TagClass::String: return "string";
    case TagClass::Array: return "array";
    case TagClass::Closure: return "closure";
    case TagClass::Object: return "object";
  }
  return "?";
}

enum class TermKind : uint8_t {
  Jump, TagTest, BoolTest, ShapeTest, OverflowTest, Call, Return, Halt,
};

enum class PropAccess : uint8_t { Read, Write };

// Stable identity of one dynamic-test site. Tag-test sites are numbered per
// classification cascade in lowering order; the probes of one cascade share
// the site id and are distinguished by probeIdx.
struct TestSite {
  uint32_t siteId = 0;
  uint32_t probeIdx = 0;
};

struct Terminator {
  TermKind kind = TermKind::Halt;

  // Jump / common successors
  BlockId target = kNoBlock;   // Jump target, TagTest/BoolTest true arm,
                               // OverflowTest ok arm, ShapeTest/Call resume
  BlockId altTarget = kNoBlock;  // false arm / overflow arm

  // TagTest / BoolTest
  RegId val = kNoReg;
  TagClass tagClass = TagClass::Int32;
  TestSite site;

  // OverflowTest payload (AddI32/SubI32/MulI32/DivI32/ModI32)
  Instr ovfOp{Op::AddI32};

  // ShapeTest property site: the lazily-extended shape-test cascade is
  // anchored here; unresolved executions fall through to the shape-miss
  // stub which appends a per-shape test to the executing version.
  uint32_t shapeSiteId = 0;
  RegId obj = kNoReg;
  uint32_t nameId = 0;
  PropAccess access = PropAccess::Read;
  RegId wval = kNoReg;  // write payload
  RegId dst = kNoReg;   // read destination / call result

  // Call
  RegId callee = kNoReg;
  RegId thisArg = kNoReg;
  std::vector<RegId> args;
  uint32_t callSiteId = 0;
  bool isCtor = false;

  // Halt
  std::string msg;

  SrcLoc loc;
};

struct BasicBlock {
  BlockId id = kNoBlock;
  std::vector<Instr> instrs;
  Terminator term;
};

enum class BuiltinKind : uint8_t { None, Print, Clock };

struct FunctionIR {
  FuncId id = kNoFunc;
  std::string name;
  uint32_t paramCount = 0;  // source parameters; `this` is reg 0, params follow
  uint32_t numRegs = 0;
  BlockId entry = 0;
  std::vector<BasicBlock> blocks;
  std::vector<std::vector<uint32_t>> liveIn;  // sorted reg ids per block
  uint32_t tagSiteCount = 0;
  uint32_t shapeSiteCount = 0;
  uint32_t callSiteCount = 0;
  BuiltinKind builtin = BuiltinKind::None;
  SrcLoc loc;
};

struct GlobalInfo {
  std::string name;
  // Set when the global is bound exactly once, by a top-level function
  // declaration (or a builtin), and is never an assignment target. Such
  // bindings give known callee identity under typed-shape modes.
  FuncId stableClosure = kNoFunc;
};

struct ProgramIR {
  std::vector<FunctionIR> functions;  // [0] is top-level code
  std::vector<GlobalInfo> globals;
  std::unordered_map<std::string, uint32_t> globalIds;
  std::vector<std::string> strings;  // literal table, interned
  std::unordered_map<std::string, uint32_t> stringIds;
  std::vector<std::string> propNames;
  std::unordered_map<std::string, uint32_t> propNameIds;
  FuncId printFn = kNoFunc;
  FuncId clockFn = kNoFunc;

  uint32_t intern_string(const std::string& s) {
    auto it = stringIds.find(s);
    if (it != stringIds.end()) return it->second;
    uint32_t id = (uint32_t)strings.size();
    strings.push_back(s);
    stringIds.emplace(s, id);
    return id;
  }

  uint32_t intern_prop(const std::string& s) {
    auto it = propNameIds.find(s);
    if (it != propNameIds.end()) return it->second;
    uint32_t id = (uint32_t)propNames.size();
    propNames.push_back(s);
    propNameIds.emplace(s, id);
    return id;
  }

  uint32_t global_id(const std::string& s) {
    auto it = globalIds.find(s);
    if (it != globalIds.end()) return it->second;
    uint32_t id = (uint32_t)globals.size();
    globals.push_back(GlobalInfo{s, kNoFunc});
    globalIds.emplace(s, id);
    return id;
  }
};

// --- textual dump, one block per paragraph, stable ordering ---

inline std::string instr_text(const ProgramIR& prog, const Instr& in) {
  auto r = [](RegId v) { return "v" + std::to_string(v); };
  std::ostringstream os;
  switch (in.op) {
    case Op::ConstInt: os << r(in.dst) << " = const.i32 " << in.imm; break;
    case Op::ConstFloat: os << r(in.dst) << " = const.f64 " << in.fimm; break;
    case Op::ConstStr: os << r(in.dst) << " = const.str \"" << prog.strings[in.sym] << "\""; break;
    case Op::ConstBool: os << r(in.dst) << " = const.bool " << (in.imm ? "true" : "false"); break;
    case Op::ConstUndef: os << r(in.dst) << " = const.undef"; break;
    case Op::ConstNull: os << r(in.dst) << " = const.null"; break;
    case Op::MakeClosure: os << r(in.dst) << " = make_closure f" << in.sym; break;
    case Op::Move: os << r(in.dst) << " = move " << r(in.a); break;
    case Op::AddI32: os << r(in.dst) << " = add.i32 " << r(in.a) << ", " << r(in.b); break;
    case Op::SubI32: os << r(in.dst) << " = sub.i32 " << r(in.a) << ", " << r(in.b); break;
    case Op::MulI32: os << r(in.dst) << " = mul.i32 " << r(in.a) << ", " << r(in.b); break;
    case Op::DivI32: os << r(in.dst) << " = div.i32 " << r(in.a) << ", " << r(in.b); break;
    case Op::ModI32: os << r(in.dst) << " = mod.i32 " << r(in.a) << ", " << r(in.b); break;
    case Op::AddF64: os << r(in.dst) << " = add.f64 " << r(in.a) << ", " << r(in.b); break;
    case Op::SubF64: os << r(in.dst) << " = sub.f64 " << r(in.a) << ", " << r(in.b); break;
    case Op::MulF64: os << r(in.dst) << " = mul.f64 " << r(in.a) << ", " << r(in.b); break;
    case Op::DivF64: os << r(in.dst) << " = div.f64 " << r(in.a) << ", " << r(in.b); break;
    case Op::CmpI32: os << r(in.dst) << " = cmp.i32." << (int)in.imm << " " << r(in.a) << ", " << r(in.b); break;
    case Op::CmpF64: os << r(in.dst) << " = cmp.f64." << (int)in.imm << " " << r(in.a) << ", " << r(in.b); break;
    case Op::CmpRef: os << r(in.dst) << " = cmp.ref." << (int)in.imm << " " << r(in.a) << ", " << r(in.b); break;
    case Op::StrEq: os << r(in.dst) << " = str_eq." << (int)in.imm << " " << r(in.a) << ", " << r(in.b); break;
    case Op::StrConcat: os << r(in.dst) << " = str_concat " << r(in.a) << ", " << r(in.b); break;
    case Op::I32toF64: os << r(in.dst) << " = i32_to_f64 " << r(in.a); break;
    case Op::AllocObject: os << r(in.dst) << " = alloc_object"; break;
    case Op::AllocArray: os << r(in.dst) << " = alloc_array " << in.sym; break;
    case Op::ArrayRead: os << r(in.dst) << " = array_read " << r(in.a) << "[" << r(in.b) << "]"; break;
    case Op::ArrayWrite: os << "array_write " << r(in.a) << "[" << r(in.b) << "] = " << r(in.c); break;
    case Op::ArrayLen: os << r(in.dst) << " = array_len " << r(in.a); break;
    case Op::GetGlobal: os << r(in.dst) << " = get_global " << prog.globals[in.sym].name; break;
    case Op::SetGlobal: os << "set_global " << prog.globals[in.sym].name << " = " << r(in.a); break;
    case Op::ReadSlot: os << r(in.dst) << " = read_slot " << r(in.a) << "." << in.imm; break;
    case Op::WriteSlot: os << "write_slot " << r(in.a) << "." << in.imm << " = " << r(in.b); break;
    case Op::ShapeUpdate: os << "shape_update " << r(in.a) << " -> S" << in.sym; break;
  }
  return os.str();
}

inline std::string term_text(const ProgramIR& prog, const Terminator& t) {
  auto r = [](RegId v) { return "v" + std::to_string(v); };
  auto b = [](BlockId v) { return "b" + std::to_string(v); };
  std::ostringstream os;
  switch (t.kind) {
    case TermKind::Jump:
      os << "jump " << b(t.target);
      break;
    case TermKind::TagTest:
      os << "tag_test " << r(t.val) << " is " << tag_class_name(t.tagClass)
         << " site#" << t.site.siteId << "." << t.site.probeIdx << " ? "
         << b(t.target) << " : " << b(t.altTarget);
      break;
    case TermKind::BoolTest:
      os << "bool_test " << r(t.val) << " ? " << b(t.target) << " : " << b(t.altTarget);
      break;
    case TermKind::ShapeTest:
      os << "shape_cascade." << (t.access == PropAccess::Read ? "read" : "write")
         << " " << r(t.obj) << "." << prog.propNames[t.nameId] << " site#"
         << t.shapeSiteId;
      if (t.access == PropAccess::Read) os << " -> " << r(t.dst);
      else os << " = " << r(t.wval);
      os << ", resume " << b(t.target) << " ; miss -> halt shape-miss-stub";
      break;
    case TermKind::OverflowTest:
      os << "ovf_test [" << instr_text(prog, t.ovfOp) << "] ok " << b(t.target)
         << " : " << b(t.altTarget);
      break;
    case TermKind::Call:
      os << "call " << r(t.callee) << "(this=" << r(t.thisArg);
      for (RegId a : t.args) os << ", " << r(a);
      os << ") -> " << r(t.dst) << " site#" << t.callSiteId << ", resume "
         << b(t.target);
      break;
    case TermKind::Return:
      os << "return " << r(t.val);
      break;
    case TermKind::Halt:
      os << "halt \"" << t.msg << "\"";
      if (t.val != kNoReg) os << " " << r(t.val);
      break;
  }
  return os.str();
}

inline std::string dump_function(const ProgramIR& prog, const FunctionIR& fn) {
  std::ostringstream os;
  os << "function f" << fn.id << " " << (fn.name.empty() ? "<anon>" : fn.name)
     << " params=" << fn.paramCount << " regs=" << fn.numRegs << "\n";
  for (const BasicBlock& blk : fn.blocks) {
    os << "b" << blk.id << ":\n";
    for (const Instr& in : blk.instrs) os << "  " << instr_text(prog, in) << "\n";
    os << "  " << term_text(prog, blk.term) << "\n";
  }
  return os.str();
}

inline std::string dump_ir(const ProgramIR& prog) {
  std::ostringstream os;
  for (const FunctionIR& fn : prog.functions) {
    if (fn.builtin != BuiltinKind::None) continue;
    os << dump_function(prog, fn) << "\n";
  }
  return os.str();
}

}  // namespace bbvm
