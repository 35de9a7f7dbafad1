#pragma once

#include <map>
#include <string>
#include <vector>

#include "bbvm/ir.hpp"

namespace bbvm {

// Structural checks over lowered IR. The single-terminator and
// straight-line-instruction invariants are unrepresentable by construction
// (a block holds exactly one Terminator and Instr carries no control flow);
// the checks here cover what a hand-constructed FunctionIR can get wrong.
inline std::vector<std::string> verify(const FunctionIR& fn) {
  std::vector<std::string> out;
  auto complain = [&](std::string s) { out.push_back(std::move(s)); };

  if (fn.blocks.empty()) {
    complain("function has no blocks");
    return out;
  }
  if (fn.entry >= fn.blocks.size()) complain("entry block does not exist");

  auto check_target = [&](BlockId b, const char* what, BlockId from) {
    if (b == kNoBlock || b >= fn.blocks.size())
      complain("b" + std::to_string(from) + ": " + what + " references missing block");
  };

  // (site, probe) -> class: duplicated paths may re-ask a question, but one
  // probe id must always ask the same one
  std::map<std::pair<uint32_t, uint32_t>, TagClass> tagSites;
  for (const BasicBlock& b : fn.blocks) {
    for (const Instr& in : b.instrs) {
      switch (in.op) {
        case Op::AddI32:
        case Op::SubI32:
        case Op::MulI32:
        case Op::DivI32:
        case Op::ModI32:
          complain("b" + std::to_string(b.id) +
                   ": int arithmetic outside an overflow test");
          break;
        case Op::ReadSlot:
        case Op::WriteSlot:
        case Op::ShapeUpdate:
          complain("b" + std::to_string(b.id) + ": slot op in unspecialized IR");
          break;
        default:
          break;
      }
    }
    const Terminator& t = b.term;
    switch (t.kind) {
      case TermKind::Jump:
        check_target(t.target, "jump", b.id);
        break;
      case TermKind::TagTest: {
        check_target(t.target, "tag-test true arm", b.id);
        check_target(t.altTarget, "tag-test false arm", b.id);
        auto [it, inserted] =
            tagSites.insert({{t.site.siteId, t.site.probeIdx}, t.tagClass});
        if (!inserted && it->second != t.tagClass)
          complain("tag-test site #" + std::to_string(t.site.siteId) + "." +
                   std::to_string(t.site.probeIdx) + " asks inconsistent classes");
        break;
      }
      case TermKind::BoolTest:
        check_target(t.target, "bool-test true arm", b.id);
        check_target(t.altTarget, "bool-test false arm", b.id);
        break;
      case TermKind::OverflowTest:
        check_target(t.target, "overflow ok arm", b.id);
        check_target(t.altTarget, "overflow arm", b.id);
        if (t.ovfOp.op != Op::AddI32 && t.ovfOp.op != Op::SubI32 &&
            t.ovfOp.op != Op::MulI32 && t.ovfOp.op != Op::DivI32 &&
            t.ovfOp.op != Op::ModI32)
          complain("b" + std::to_string(b.id) + ": overflow test on non-int op");
        break;
      case TermKind::ShapeTest:
        check_target(t.target, "shape-site resume", b.id);
        break;
      case TermKind::Call:
        check_target(t.target, "call continuation", b.id);
        break;
      case TermKind::Return:
      case TermKind::Halt:
        break;
    }
  }

  // def-before-use on every path (forward may-be-undefined analysis over
  // reachable blocks; `this` and parameters are defined at entry)
  size_t n = fn.blocks.size();
  uint32_t regs = fn.numRegs;
  std::vector<std::vector<bool>> definedIn(n, std::vector<bool>(regs, false));
  std::vector<bool> seen(n, false);
  std::vector<bool> entryDef(regs, false);
  for (uint32_t r = 0; r <= fn.paramCount && r < regs; ++r) entryDef[r] = true;
  if (fn.entry < n) {
    definedIn[fn.entry] = entryDef;
    seen[fn.entry] = true;
  }
  bool changed = true;
  auto meet = [&](BlockId to, const std::vector<bool>& defs) {
    if (to == kNoBlock || to >= n) return;
    if (!seen[to]) {
      definedIn[to] = defs;
      seen[to] = true;
      changed = true;
      return;
    }
    for (uint32_t r = 0; r < regs; ++r) {
      if (definedIn[to][r] && !defs[r]) {
        definedIn[to][r] = false;
        changed = true;
      }
    }
  };
  while (changed) {
    changed = false;
    for (size_t bi = 0; bi < n; ++bi) {
      if (!seen[bi]) continue;
      std::vector<bool> defs = definedIn[bi];
      auto use = [&](RegId r, const char* what) {
        if (r == kNoReg) return;
        if (r >= regs) {
          complain("b" + std::to_string(bi) + ": register out of range in " + what);
          return;
        }
        if (!defs[r])
          complain("b" + std::to_string(bi) + ": use of undefined value v" +
                   std::to_string(r) + " in " + what);
      };
      auto def = [&](RegId r) {
        if (r != kNoReg && r < regs) defs[r] = true;
      };
      for (const Instr& in : fn.blocks[bi].instrs) {
        use(in.a, "instruction");
        use(in.b, "instruction");
        use(in.c, "instruction");
        def(in.dst);
      }
      const Terminator& t = fn.blocks[bi].term;
      switch (t.kind) {
        case TermKind::Jump:
          meet(t.target, defs);
          break;
        case TermKind::TagTest:
        case TermKind::BoolTest:
          use(t.val, "test");
          meet(t.target, defs);
          meet(t.altTarget, defs);
          break;
        case TermKind::OverflowTest: {
          use(t.ovfOp.a, "overflow test");
          use(t.ovfOp.b, "overflow test");
          std::vector<bool> ok = defs;
          if (t.ovfOp.dst != kNoReg && t.ovfOp.dst < regs) ok[t.ovfOp.dst] = true;
          meet(t.target, ok);
          meet(t.altTarget, defs);
          break;
        }
        case TermKind::ShapeTest: {
          use(t.obj, "property site");
          if (t.access == PropAccess::Write) use(t.wval, "property site");
          std::vector<bool> after = defs;
          if (t.access == PropAccess::Read && t.dst != kNoReg && t.dst < regs)
            after[t.dst] = true;
          meet(t.target, after);
          break;
        }
        case TermKind::Call: {
          use(t.callee, "call");
          use(t.thisArg, "call");
          for (RegId a : t.args) use(a, "call");
          std::vector<bool> after = defs;
          if (t.dst != kNoReg && t.dst < regs) after[t.dst] = true;
          meet(t.target, after);
          break;
        }
        case TermKind::Return:
          use(t.val, "return");
          break;
        case TermKind::Halt:
          if (t.val != kNoReg) use(t.val, "halt");
          break;
      }
    }
  }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<std::string> verify_program(const ProgramIR& prog) {
  std::vector<std::string> out;
  for (const FunctionIR& fn : prog.functions) {
    if (fn.builtin != BuiltinKind::None) continue;
    for (std::string& v : verify(fn))
      out.push_back("f" + std::to_string(fn.id) + " (" + fn.name + "): " + v);
  }
  return out;
}

}  // namespace bbvm
