#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "bbvm/ir.hpp"
#include "bbvm/shapes.hpp"
#include "bbvm/stats.hpp"
#include "bbvm/value.hpp"

namespace bbvm {

// Execution modes form a ladder: each step enables strictly more type
// knowledge for the specializer. `Oracle` executes the baseline lowering
// twice (record, then rerun with constant-outcome tag tests removed).
enum class ExecMode : uint8_t { Baseline, Intra, Shapes, Entry, EntryCont, Oracle };

inline const char* mode_name(ExecMode m) {
  switch (m) {
    case ExecMode::Baseline: return "baseline";
    case ExecMode::Intra: return "intra";
    case ExecMode::Shapes: return "shapes";
    case ExecMode::Entry: return "entry";
    case ExecMode::EntryCont: return "entry+cont";
    case ExecMode::Oracle: return "oracle";
  }
  return "?";
}

inline std::optional<ExecMode> parse_mode(const std::string& s) {
  if (s == "baseline") return ExecMode::Baseline;
  if (s == "intra") return ExecMode::Intra;
  if (s == "shapes") return ExecMode::Shapes;
  if (s == "entry") return ExecMode::Entry;
  if (s == "entry+cont" || s == "entrycont") return ExecMode::EntryCont;
  if (s == "oracle") return ExecMode::Oracle;
  return std::nullopt;
}

struct Limits {
  uint32_t maxVers = 5;
  uint32_t maxEntries = 5;
  uint64_t maxInstrs = 4000000000ull;
  uint32_t maxDepth = 10000;
};

struct Features {
  bool inference = false;   // context accumulation + propagation (off = baseline)
  bool shapesInCtx = false; // typed shapes in contexts, method identity, stable globals
  bool entrySpec = false;
  bool contSpec = false;
  bool entryShapes = false; // keep shapes in entry-point keys
  bool validate = false;
  uint32_t maxVers = 5;
  uint32_t maxEntries = 5;

  static Features for_mode(ExecMode m, const Limits& lim, bool entryShapes, bool validate) {
    Features f;
    f.entryShapes = entryShapes;
    f.validate = validate;
    f.maxVers = lim.maxVers;
    f.maxEntries = lim.maxEntries;
    switch (m) {
      case ExecMode::Oracle:
      case ExecMode::Baseline:
        f.maxVers = 1;
        break;
      case ExecMode::Intra:
        f.inference = true;
        break;
      case ExecMode::Shapes:
        f.inference = true;
        f.shapesInCtx = true;
        break;
      case ExecMode::Entry:
        f.inference = true;
        f.shapesInCtx = true;
        f.entrySpec = true;
        break;
      case ExecMode::EntryCont:
        f.inference = true;
        f.shapesInCtx = true;
        f.entrySpec = true;
        f.contSpec = true;
        break;
    }
    return f;
  }
};

enum class RunStatus : uint8_t { Ok, Halted, DeterminismViolation, ValidationFailure, Internal };

struct ExecResult {
  RunStatus status = RunStatus::Ok;
  std::string message;
  Value result;           // main's return value when status == Ok
  std::string output;     // everything print() wrote
};

// Tag-test probes removed by the simulated perfect analysis: packed site
// key -> the constant outcome observed during the recording run.
using RemovalTable = std::unordered_map<uint64_t, bool>;

class Engine {
 public:
  Engine(const ProgramIR& prog, Features feat, Limits limits = {},
         const RemovalTable* removals = nullptr)
      : prog_(prog), feat_(feat), limits_(limits), removals_(removals) {
    fnStates_.resize(prog_.functions.size());
    for (size_t i = 0; i < prog_.functions.size(); ++i) {
      const FunctionIR& fn = prog_.functions[i];
      fnStates_[i].blockVers.resize(fn.blocks.size());
      fnStates_[i].nonGenericCount.assign(fn.blocks.size(), 0);
      fnStates_[i].genericVers.assign(fn.blocks.size(), nullptr);
      if (fn.builtin == BuiltinKind::Print) {
        fnStates_[i].ret.st = RetStateKind::Known;
        fnStates_[i].ret.tag = TypeTag::constant();
      } else if (fn.builtin == BuiltinKind::Clock) {
        fnStates_[i].ret.st = RetStateKind::Known;
        fnStates_[i].ret.tag = TypeTag::float64();
      }
    }
    // literal strings share ids with the heap's intern table
    for (const std::string& s : prog_.strings) heap_.intern(s);
  }

  ExecResult run() {
    seed_globals();
    frames_.clear();
    Frame main;
    main.fn = 0;
    main.regs.assign(prog_.functions[0].numRegs, Value::undefined());
    frames_.push_back(std::move(main));
    ExecResult res =
        loop(request_version(0, prog_.functions[0].entry, TypeContext{}));
    finalize_stats();
    return res;
  }

  // Calls a global function with no arguments on top of the current VM
  // state (globals, heap, compiled code all persist). Used by the
  // benchmark harness after run() has executed the top-level code.
  ExecResult invoke_global(const std::string& name) {
    ExecResult res;
    auto it = prog_.globalIds.find(name);
    if (it == prog_.globalIds.end() || !globals_[it->second] ||
        globals_[it->second]->kind != ValKind::Closure) {
      res.status = RunStatus::Halted;
      res.message = "corpus convention violated: no global function '" + name + "'";
      return res;
    }
    FuncId fid = globals_[it->second]->ref;
    if (is_builtin(fid)) {
      res.status = RunStatus::Halted;
      res.message = "cannot benchmark a builtin";
      return res;
    }
    frames_.clear();
    Frame fr;
    fr.fn = fid;
    fr.regs.assign(fnIR(fid).numRegs, Value::undefined());
    frames_.push_back(std::move(fr));
    res = loop(generic_entry(fid)->v);
    finalize_stats();
    return res;
  }

  const Stats& stats() const { return stats_; }
  Stats& stats() { return stats_; }
  const ShapeTable& shape_table() const { return shapes_; }

  // ---- introspection for tests, dumps and reports ----

  struct EntrySummary {
    std::string argTags;   // canonical text of the entry context
    bool isGeneric = false;
    uint32_t tagTests = 0;    // TagTest terminators reachable from the entry
    uint32_t shapeTests = 0;  // materialized shape-test cascade entries
    uint32_t versions = 0;    // reachable compiled versions
  };

  std::vector<EntrySummary> entry_summaries(FuncId fn) {
    std::vector<EntrySummary> out;
    FnState& st = fnStates_[fn];
    std::vector<std::pair<uint32_t, const EntryRec*>> ordered;
    for (const auto& [key, rec] : st.entries) ordered.push_back({rec->seq, rec.get()});
    std::sort(ordered.begin(), ordered.end(),
              [](auto& a, auto& b) { return a.first < b.first; });
    for (auto& [seq, rec] : ordered) {
      EntrySummary s;
      s.argTags = rec->argCtx.describe_tags();
      s.isGeneric = false;
      count_reachable(rec->v, &s);
      out.push_back(std::move(s));
    }
    if (st.genericEntry) {
      EntrySummary s;
      s.argTags = "{}";
      s.isGeneric = true;
      count_reachable(st.genericEntry->v, &s);
      out.push_back(std::move(s));
    }
    return out;
  }

  uint32_t specialized_entry_count(FuncId fn) const {
    return fnStates_[fn].specializedEntries;
  }

  struct BlockVersionCount {
    uint32_t nonGeneric = 0;
    bool hasGeneric = false;
  };
  BlockVersionCount block_version_count(FuncId fn, BlockId b) const {
    return {fnStates_[fn].nonGenericCount[b], fnStates_[fn].genericVers[b] != nullptr};
  }
  uint32_t max_block_versions(FuncId fn) const {
    uint32_t m = 0;
    for (uint32_t c : fnStates_[fn].nonGenericCount) m = std::max(m, c);
    return m;
  }

  std::string dump_versions();
  std::string dump_shapes() const { return shapes_.dump(); }

 private:
  // ---------- compiled code ----------

  struct Version;
  struct EntryRec;
  struct ContRec;

  struct PicEntry {
    ShapeId shape;
    enum class Kind : uint8_t { Read, WriteSame, WriteTrans, WriteGeneric } kind;
    uint32_t slot = 0;
    ShapeId target = kNoShape;
    Version* resume = nullptr;
  };

  struct CTerm {
    enum class K : uint8_t {
      Jump, TagTest, CheckedJump, BoolTest, Ovf, Dispatch, Call, Ret, Halt,
    } k = K::Halt;
    Version* a = nullptr;
    Version* b = nullptr;
    RegId val = kNoReg;
    TagClass cls = TagClass::Int32;
    SiteKey site{0, 0, 0};
    bool expected = false;  // CheckedJump
    Instr ovfOp{Op::AddI32};
    // property dispatch
    RegId obj = kNoReg;
    uint32_t nameId = 0;
    PropAccess access = PropAccess::Read;
    RegId wval = kNoReg;
    RegId dst = kNoReg;
    BlockId resumeBlock = kNoBlock;
    TypeContext ctxAtSite;
    TypeTag staticValTag;
    std::vector<PicEntry> pic;
    // call
    RegId callee = kNoReg;
    RegId thisArg = kNoReg;
    std::vector<RegId> args;
    FuncId staticCallee = kNoFunc;
    EntryRec* entry = nullptr;
    ContRec* cont = nullptr;
    TypeContext contBaseCtx;
    bool knownIdentity = false;
    // ret / halt
    TypeTag retTag;
    std::string msg;
    SrcLoc loc;
  };

  struct Version {
    FuncId fn = kNoFunc;
    BlockId block = kNoBlock;
    TypeContext ctx;
    bool isGeneric = false;
    bool isCont = false;
    bool compiled = false;
    uint32_t seq = 0;
    std::vector<Instr> code;
    CTerm term;
  };

  struct EntryRec {
    TypeContext argCtx;
    Version* v = nullptr;
    bool isGeneric = false;
    uint32_t seq = 0;
  };

  enum class RetStateKind : uint8_t { Unseen, Known, Unknown };

  struct RetState {
    RetStateKind st = RetStateKind::Unseen;
    TypeTag tag;
    std::set<ContRec*> dependents;
  };

  struct ContRec {
    FuncId callerFn = kNoFunc;
    uint32_t callSiteId = 0;
    BlockId resumeBlock = kNoBlock;
    bool forcedUnknown = false;  // set by invalidation; monotone
    bool registered = false;
    std::unordered_map<ContextKey, Version*> versions;
  };

  struct FnState {
    std::vector<std::unordered_map<ContextKey, Version*>> blockVers;
    std::vector<uint32_t> nonGenericCount;
    std::vector<Version*> genericVers;
    std::map<ContextKey, std::unique_ptr<EntryRec>> entries;
    std::unique_ptr<EntryRec> genericEntry;
    uint32_t specializedEntries = 0;
    uint32_t entrySeq = 0;
    RetState ret;
    std::map<uint32_t, std::unique_ptr<ContRec>> contRecs;
  };

  struct Frame {
    FuncId fn = kNoFunc;
    std::vector<Value> regs;
    const CTerm* callTerm = nullptr;  // null in the top-level frame
  };

  const ProgramIR& prog_;
  Features feat_;
  Limits limits_;
  const RemovalTable* removals_;

  Stats stats_;
  ShapeTable shapes_;
  Heap heap_;
  std::vector<std::optional<Value>> globals_;
  std::vector<Frame> frames_;
  std::deque<Version> versionStore_;
  uint32_t versionSeq_ = 0;
  std::vector<FnState> fnStates_;
  std::string output_;
  uint64_t instrBudget_ = 0;

  FnState& fnState(FuncId f) { return fnStates_[f]; }
  const FunctionIR& fnIR(FuncId f) const { return prog_.functions[f]; }
  bool is_builtin(FuncId f) const { return fnIR(f).builtin != BuiltinKind::None; }

  void seed_globals() {
    globals_.assign(prog_.globals.size(), std::nullopt);
    auto seed = [&](const char* name, Value v) {
      auto it = prog_.globalIds.find(name);
      if (it != prog_.globalIds.end()) globals_[it->second] = v;
    };
    seed("undefined", Value::undefined());
    seed("print", Value::closure(prog_.printFn));
    seed("clock", Value::closure(prog_.clockFn));
  }

  // ---------- version management ----------

  Version* new_version(FuncId fn, BlockId block, TypeContext ctx, bool generic,
                       bool isCont = false) {
    versionStore_.emplace_back();
    Version* v = &versionStore_.back();
    v->fn = fn;
    v->block = block;
    v->ctx = std::move(ctx);
    v->isGeneric = generic;
    v->isCont = isCont;
    v->seq = versionSeq_++;
    ++stats_.stubEvents;
    return v;
  }

  // Exact-context-key lookup with a hard cap: contexts beyond the cap fall
  // back to the block's single generic version, which assumes nothing.
  Version* request_version(FuncId fn, BlockId block, const TypeContext& ctx) {
    FnState& st = fnState(fn);
    TypeContext r;
    if (feat_.inference) r = ctx.restricted(fnIR(fn).liveIn[block]);
    if (r.empty()) {
      if (!st.genericVers[block])
        st.genericVers[block] = new_version(fn, block, TypeContext{}, true);
      return st.genericVers[block];
    }
    ContextKey key = r.key();
    auto& m = st.blockVers[block];
    auto it = m.find(key);
    if (it != m.end()) return it->second;
    if (st.nonGenericCount[block] < feat_.maxVers) {
      Version* v = new_version(fn, block, std::move(r), false);
      m.emplace(std::move(key), v);
      ++st.nonGenericCount[block];
      return v;
    }
    if (!st.genericVers[block])
      st.genericVers[block] = new_version(fn, block, TypeContext{}, true);
    return st.genericVers[block];
  }

  // Specialized entry points are keyed by the live, widened argument
  // context; an empty key means the generic entry.
  EntryRec* request_entry_point(FuncId fn, const TypeContext& argCtx) {
    FnState& st = fnState(fn);
    const FunctionIR& ir = fnIR(fn);
    TypeContext key = argCtx.restricted(ir.liveIn[ir.entry]);
    if (!feat_.entryShapes) key.drop_all_shapes();
    if (key.empty()) return generic_entry(fn);
    ContextKey k = key.key();
    auto it = st.entries.find(k);
    if (it != st.entries.end()) return it->second.get();
    if (st.specializedEntries >= feat_.maxEntries) return generic_entry(fn);
    auto rec = std::make_unique<EntryRec>();
    rec->argCtx = key;
    rec->v = request_version(fn, ir.entry, key);
    rec->seq = st.entrySeq++;
    ++st.specializedEntries;
    EntryRec* raw = rec.get();
    st.entries.emplace(std::move(k), std::move(rec));
    return raw;
  }

  EntryRec* generic_entry(FuncId fn) {
    FnState& st = fnState(fn);
    if (!st.genericEntry) {
      st.genericEntry = std::make_unique<EntryRec>();
      st.genericEntry->isGeneric = true;
      st.genericEntry->v = request_version(fn, fnIR(fn).entry, TypeContext{});
      st.genericEntry->seq = st.entrySeq++;
    }
    return st.genericEntry.get();
  }

  ContRec* cont_record(FuncId callerFn, uint32_t callSiteId, BlockId resume) {
    FnState& st = fnState(callerFn);
    auto it = st.contRecs.find(callSiteId);
    if (it != st.contRecs.end()) return it->second.get();
    auto rec = std::make_unique<ContRec>();
    rec->callerFn = callerFn;
    rec->callSiteId = callSiteId;
    rec->resumeBlock = resume;
    ContRec* raw = rec.get();
    st.contRecs.emplace(callSiteId, std::move(rec));
    return raw;
  }

  // Memorize the type a return site compiles with. Monotone toward
  // Unknown; a contradiction invalidates every dependent continuation
  // before the newly compiled return can ever execute.
  void record_return_type(FuncId fn, TypeTag tag) {
    RetState& rs = fnState(fn).ret;
    bool known = !tag.is_unknown();
    switch (rs.st) {
      case RetStateKind::Unseen:
        rs.st = known ? RetStateKind::Known : RetStateKind::Unknown;
        rs.tag = tag;
        if (!known) invalidate_continuations(fn);  // no-op on empty dependents
        break;
      case RetStateKind::Known:
        if (known && rs.tag == tag) break;
        rs.st = RetStateKind::Unknown;
        invalidate_continuations(fn);
        break;
      case RetStateKind::Unknown:
        break;
    }
  }

  void invalidate_continuations(FuncId fn) {
    RetState& rs = fnState(fn).ret;
    if (rs.dependents.empty()) return;
    for (ContRec* rec : rs.dependents) {
      rec->forcedUnknown = true;
      for (auto& [k, v] : rec->versions)
        stats_.emittedInstrRetained -= (v->compiled ? v->code.size() + 1 : 0);
      rec->versions.clear();
      rec->registered = false;
      ++stats_.continuationsInvalidated;
    }
    rs.dependents.clear();
    stats_.invalidatingFunctions.insert(fn);
  }

  // ---------- the specializer ----------

  static bool class_matches(const TypeTag& t, TagClass c) {
    switch (t.kind) {
      case TagKind::Int32: return c == TagClass::Int32;
      case TagKind::Float64: return c == TagClass::Float64;
      case TagKind::Null: return c == TagClass::Null;
      case TagKind::Const: return c == TagClass::Const;
      case TagKind::String: return c == TagClass::String;
      case TagKind::Array: return c == TagClass::Array;
      case TagKind::ClosureKnown:
      case TagKind::ClosureUnknown: return c == TagClass::Closure;
      case TagKind::Object: return c == TagClass::Object;
      case TagKind::Unknown: return false;
    }
    return false;
  }

  static TypeTag class_tag(TagClass c) {
    switch (c) {
      case TagClass::Int32: return TypeTag::int32();
      case TagClass::Float64: return TypeTag::float64();
      case TagClass::Null: return TypeTag::null();
      case TagClass::Const: return TypeTag::constant();
      case TagClass::String: return TypeTag::string();
      case TagClass::Array: return TypeTag::array();
      case TagClass::Closure: return TypeTag::closure_unknown();
      case TagClass::Object: return TypeTag::object();
    }
    return TypeTag::unknown();
  }

  // Forward knowledge accumulated while walking straight-line code.
  void apply_instr_ctx(const Instr& in, TypeContext& ctx) {
    if (!feat_.inference) return;
    switch (in.op) {
      case Op::ConstInt: ctx.set(in.dst, TypeTag::int32()); break;
      case Op::ConstFloat: ctx.set(in.dst, TypeTag::float64()); break;
      case Op::ConstStr: ctx.set(in.dst, TypeTag::string()); break;
      case Op::ConstBool:
      case Op::ConstUndef: ctx.set(in.dst, TypeTag::constant()); break;
      case Op::ConstNull: ctx.set(in.dst, TypeTag::null()); break;
      case Op::MakeClosure: ctx.set(in.dst, TypeTag::closure(in.sym)); break;
      case Op::Move: {
        auto e = ctx.get(in.a);
        if (e) ctx.set(in.dst, e->tag, e->shape);
        else ctx.drop(in.dst);
        break;
      }
      case Op::AddF64:
      case Op::SubF64:
      case Op::MulF64:
      case Op::DivF64:
      case Op::I32toF64: ctx.set(in.dst, TypeTag::float64()); break;
      case Op::CmpI32:
      case Op::CmpF64:
      case Op::CmpRef:
      case Op::StrEq: ctx.set(in.dst, TypeTag::constant()); break;
      case Op::StrConcat: ctx.set(in.dst, TypeTag::string()); break;
      case Op::AllocObject:
        ctx.set(in.dst, TypeTag::object(),
                feat_.shapesInCtx ? shapes_.root() : kNoShape);
        break;
      case Op::AllocArray: ctx.set(in.dst, TypeTag::array()); break;
      case Op::ArrayRead: ctx.drop(in.dst); break;  // untyped black box
      case Op::ArrayLen: ctx.set(in.dst, TypeTag::int32()); break;
      case Op::GetGlobal: {
        FuncId stable = prog_.globals[in.sym].stableClosure;
        if (feat_.shapesInCtx && stable != kNoFunc)
          ctx.set(in.dst, TypeTag::closure(stable));
        else
          ctx.drop(in.dst);
        break;
      }
      case Op::SetGlobal:
      case Op::ArrayWrite: break;
      case Op::ReadSlot:
      case Op::WriteSlot:
      case Op::ShapeUpdate:
        throw InternalError("slot op in base IR");
      default: break;
    }
  }

  // After a re-shaping store through `written`, any other object-tagged
  // value might alias it; their shape knowledge goes stale.
  static void drop_alias_shapes(TypeContext& ctx, RegId written) {
    std::vector<uint32_t> regs;
    for (const auto& [r, e] : ctx.entries())
      if (r != written && e.shape != kNoShape) regs.push_back(r);
    for (uint32_t r : regs) ctx.drop_shape(r);
  }

  void compile(Version* v) {
    const FunctionIR& fn = fnIR(v->fn);
    const BasicBlock& blk = fn.blocks[v->block];
    TypeContext ctx = v->ctx;
    ++stats_.versionsCompiled;
    ++stats_.compileEvents;
    if (v->isCont) ++stats_.continuationsCompiled;

    for (const Instr& in : blk.instrs) {
      v->code.push_back(in);
      apply_instr_ctx(in, ctx);
    }

    const Terminator& t = blk.term;
    CTerm& ct = v->term;
    ct.loc = t.loc;
    switch (t.kind) {
      case TermKind::Jump:
        ct.k = CTerm::K::Jump;
        ct.a = request_version(v->fn, t.target, ctx);
        break;

      case TermKind::TagTest: {
        SiteKey key{v->fn, t.site.siteId, t.site.probeIdx};
        TypeTag vt = ctx.tag_of(t.val);
        if (!vt.is_unknown()) {
          ++stats_.staticTestsEliminated;
          bool matches = class_matches(vt, t.tagClass);
          ct.k = CTerm::K::Jump;
          ct.a = request_version(v->fn, matches ? t.target : t.altTarget, ctx);
          break;
        }
        if (removals_) {
          auto it = removals_->find(key.packed());
          if (it != removals_->end()) {
            bool expected = it->second;
            TypeContext c2 = ctx;
            if (expected) c2.set(t.val, class_tag(t.tagClass));
            ct.k = CTerm::K::CheckedJump;
            ct.val = t.val;
            ct.cls = t.tagClass;
            ct.site = key;
            ct.expected = expected;
            ct.a = request_version(v->fn, expected ? t.target : t.altTarget,
                                   expected ? c2 : ctx);
            break;
          }
        }
        ct.k = CTerm::K::TagTest;
        ct.val = t.val;
        ct.cls = t.tagClass;
        ct.site = key;
        TypeContext trueCtx = ctx;
        if (feat_.inference) trueCtx.set(t.val, class_tag(t.tagClass));
        ct.a = request_version(v->fn, t.target, trueCtx);
        ct.b = request_version(v->fn, t.altTarget, ctx);  // false arm keeps prior
        break;
      }

      case TermKind::BoolTest:
        ct.k = CTerm::K::BoolTest;
        ct.val = t.val;
        ct.a = request_version(v->fn, t.target, ctx);
        ct.b = request_version(v->fn, t.altTarget, ctx);
        break;

      case TermKind::OverflowTest: {
        ct.k = CTerm::K::Ovf;
        ct.ovfOp = t.ovfOp;
        TypeContext ok = ctx;
        TypeContext ovf = ctx;
        if (feat_.inference) ok.set(t.ovfOp.dst, TypeTag::int32());
        ovf.drop(t.ovfOp.dst);
        ct.a = request_version(v->fn, t.target, ok);
        ct.b = request_version(v->fn, t.altTarget, ovf);
        break;
      }

      case TermKind::ShapeTest:
        compile_prop_site(v, t, ctx);
        break;

      case TermKind::Call:
        compile_call(v, t, ctx);
        break;

      case TermKind::Return:
        ct.k = CTerm::K::Ret;
        ct.val = t.val;
        ct.retTag = feat_.inference ? ctx.tag_of(t.val) : TypeTag::unknown();
        record_return_type(v->fn, ct.retTag);
        break;

      case TermKind::Halt:
        ct.k = CTerm::K::Halt;
        ct.msg = t.msg;
        ct.val = t.val;
        break;
    }

    v->compiled = true;
    stats_.emittedInstrTotal += v->code.size() + 1;
    stats_.emittedInstrRetained += v->code.size() + 1;
  }

  // A property site compiles to a direct slot access when the receiver
  // shape is a compile-time fact; otherwise it becomes a shape-test
  // cascade that materializes one test per receiver shape seen at run time.
  void compile_prop_site(Version* v, const Terminator& t, TypeContext& ctx) {
    CTerm& ct = v->term;
    const std::string& name = prog_.propNames[t.nameId];
    ShapeId s = feat_.shapesInCtx ? ctx.shape_of(t.obj) : kNoShape;
    if (s != kNoShape) {
      if (t.access == PropAccess::Read) {
        auto info = shapes_.lookup(s, name);
        if (!info) {
          ct.k = CTerm::K::Halt;
          ct.msg = "missing property '" + name + "'";
          ct.loc = t.loc;
          return;
        }
        Instr rd{.op = Op::ReadSlot, .dst = t.dst, .a = t.obj};
        rd.imm = (int32_t)info->slot;
        v->code.push_back(rd);
        ctx.set(t.dst, info->tag);
        ++stats_.staticShapeTestsEliminated;
        ct.k = CTerm::K::Jump;
        ct.a = request_version(v->fn, t.target, ctx);
        return;
      }
      TypeTag vt = ctx.tag_of(t.wval);
      if (!vt.is_unknown()) {
        auto plan = shapes_.plan_write(s, name, vt);
        if (plan.target != s) {
          Instr su{.op = Op::ShapeUpdate, .a = t.obj};
          su.sym = plan.target;
          v->code.push_back(su);
        }
        Instr wr{.op = Op::WriteSlot, .a = t.obj, .b = t.wval};
        wr.imm = (int32_t)plan.slot;
        v->code.push_back(wr);
        ctx.set(t.obj, TypeTag::object(), plan.target);
        if (plan.target != s) drop_alias_shapes(ctx, t.obj);
        ++stats_.staticShapeTestsEliminated;
        ct.k = CTerm::K::Jump;
        ct.a = request_version(v->fn, t.target, ctx);
        return;
      }
    }
    ct.k = CTerm::K::Dispatch;
    ct.obj = t.obj;
    ct.nameId = t.nameId;
    ct.access = t.access;
    ct.wval = t.wval;
    ct.dst = t.dst;
    ct.resumeBlock = t.target;
    ct.site = SiteKey{v->fn, t.shapeSiteId, 0};
    ct.ctxAtSite = ctx;
    ct.staticValTag =
        t.access == PropAccess::Write && feat_.inference ? ctx.tag_of(t.wval)
                                                         : TypeTag::unknown();
  }

  void compile_call(Version* v, const Terminator& t, TypeContext& ctx) {
    CTerm& ct = v->term;
    ct.k = CTerm::K::Call;
    ct.callee = t.callee;
    ct.thisArg = t.thisArg;
    ct.args = t.args;
    ct.dst = t.dst;
    ct.resumeBlock = t.target;

    TypeTag calleeTag = ctx.tag_of(t.callee);
    ct.staticCallee =
        calleeTag.kind == TagKind::ClosureKnown ? calleeTag.fn : kNoFunc;
    ct.knownIdentity = ct.staticCallee != kNoFunc;

    if (feat_.entrySpec && ct.staticCallee != kNoFunc && !is_builtin(ct.staticCallee)) {
      const FunctionIR& callee = fnIR(ct.staticCallee);
      TypeContext argCtx;
      auto e = ctx.get(t.thisArg);
      if (e) argCtx.set(0, e->tag, e->shape);
      for (uint32_t i = 0; i < callee.paramCount; ++i) {
        if (i < t.args.size()) {
          auto ae = ctx.get(t.args[i]);
          if (ae) argCtx.set(1 + i, ae->tag, ae->shape);
        } else {
          argCtx.set(1 + i, TypeTag::constant());  // missing -> undefined
        }
      }
      ct.entry = request_entry_point(ct.staticCallee, argCtx);
    }

    ct.cont = cont_record(v->fn, t.callSiteId, t.target);

    // what survives the call: everything live, minus shape knowledge of
    // values that escape into the callee
    TypeContext base = ctx;
    base.drop(t.dst);
    base.drop_shape(t.thisArg);
    for (RegId a : t.args) base.drop_shape(a);
    ct.contBaseCtx = std::move(base);
  }

  // ---------- execution ----------

  struct Step {
    Version* next = nullptr;
    bool done = false;
  };

  ExecResult loop(Version* cur) {
    ExecResult res;
    for (;;) {
      if (!enter(cur, res)) break;
      Step s = exec_version(cur, res);
      if (s.done) break;
      cur = s.next;
    }
    res.output = output_;
    return res;
  }

  bool enter(Version* v, ExecResult& res) {
    ++stats_.versionEnters;
    if (!v->compiled) {
      try {
        compile(v);
      } catch (const InternalError& e) {
        res.status = RunStatus::Internal;
        res.message = e.what();
        return false;
      }
    }
    if (feat_.validate && !validate(v, res)) return false;
    return true;
  }

  bool validate(Version* v, ExecResult& res) {
    const Frame& fr = frames_.back();
    for (const auto& [reg, e] : v->ctx.entries()) {
      const Value& val = fr.regs[reg];
      TypeTag rt = runtime_tag(val);
      if (!tag_leq(rt, e.tag)) {
        res.status = RunStatus::ValidationFailure;
        res.message = "context/runtime tag mismatch at f" + std::to_string(v->fn) +
                      " b" + std::to_string(v->block) + " v" + std::to_string(reg) +
                      ": context says " + tag_name(e.tag) + ", runtime is " +
                      tag_name(rt);
        return false;
      }
      if (e.shape != kNoShape) {
        if (val.kind != ValKind::Object ||
            heap_.object(val.ref).shape != e.shape) {
          res.status = RunStatus::ValidationFailure;
          res.message = "context/runtime shape mismatch at f" + std::to_string(v->fn) +
                        " b" + std::to_string(v->block) + " v" + std::to_string(reg);
          return false;
        }
      }
      ++stats_.validatedEntries;
    }
    return true;
  }

  Step halt(ExecResult& res, RunStatus st, std::string msg) {
    res.status = st;
    res.message = std::move(msg);
    return {nullptr, true};
  }

  Step exec_version(Version* v, ExecResult& res) {
    Frame& fr = frames_.back();
    instrBudget_ += v->code.size() + 1;
    stats_.executedInstrs += v->code.size() + 1;
    if (instrBudget_ > limits_.maxInstrs)
      return halt(res, RunStatus::Halted, "instruction budget exceeded");

    for (const Instr& in : v->code) {
      if (!exec_instr(in, fr, res)) return {nullptr, true};
    }
    return exec_term(v, res);
  }

  bool exec_instr(const Instr& in, Frame& fr, ExecResult& res) {
    auto& R = fr.regs;
    switch (in.op) {
      case Op::ConstInt: R[in.dst] = Value::int32(in.imm); break;
      case Op::ConstFloat: R[in.dst] = Value::float64(in.fimm); break;
      case Op::ConstStr: R[in.dst] = Value::string(heap_.intern(prog_.strings[in.sym])); break;
      case Op::ConstBool: R[in.dst] = Value::boolean(in.imm != 0); break;
      case Op::ConstUndef: R[in.dst] = Value::undefined(); break;
      case Op::ConstNull: R[in.dst] = Value::null(); break;
      case Op::MakeClosure: R[in.dst] = Value::closure(in.sym); break;
      case Op::Move: R[in.dst] = R[in.a]; break;
      case Op::AddF64: R[in.dst] = Value::float64(R[in.a].f + R[in.b].f); break;
      case Op::SubF64: R[in.dst] = Value::float64(R[in.a].f - R[in.b].f); break;
      case Op::MulF64: R[in.dst] = Value::float64(R[in.a].f * R[in.b].f); break;
      case Op::DivF64: R[in.dst] = Value::float64(R[in.a].f / R[in.b].f); break;
      case Op::CmpI32:
        R[in.dst] = Value::boolean(cmp_i32((CmpKind)in.imm, R[in.a].i, R[in.b].i));
        break;
      case Op::CmpF64:
        R[in.dst] = Value::boolean(cmp_f64((CmpKind)in.imm, R[in.a].f, R[in.b].f));
        break;
      case Op::CmpRef: {
        const Value& a = R[in.a];
        const Value& b = R[in.b];
        bool eq = a.kind == b.kind;
        if (eq) {
          switch (a.kind) {
            case ValKind::Null: eq = true; break;
            case ValKind::Const: eq = a.c == b.c; break;
            case ValKind::Int32: eq = a.i == b.i; break;
            case ValKind::Float64: eq = a.f == b.f; break;
            default: eq = a.ref == b.ref; break;
          }
        }
        R[in.dst] = Value::boolean((CmpKind)in.imm == CmpKind::Ne ? !eq : eq);
        break;
      }
      case Op::StrEq: {
        bool eq = R[in.a].ref == R[in.b].ref;  // interned
        R[in.dst] = Value::boolean((CmpKind)in.imm == CmpKind::Ne ? !eq : eq);
        break;
      }
      case Op::StrConcat:
        R[in.dst] = Value::string(heap_.intern(heap_.str(R[in.a].ref) + heap_.str(R[in.b].ref)));
        break;
      case Op::I32toF64: R[in.dst] = Value::float64((double)R[in.a].i); break;
      case Op::AllocObject: R[in.dst] = Value::object(heap_.new_object()); break;
      case Op::AllocArray: R[in.dst] = Value::array(heap_.new_array(in.sym)); break;
      case Op::ArrayRead: {
        auto& arr = heap_.array(R[in.a].ref).elems;
        int32_t idx = R[in.b].i;
        if (idx < 0 || (size_t)idx >= arr.size()) {
          halt(res, RunStatus::Halted, "array index out of bounds");
          return false;
        }
        R[in.dst] = arr[(size_t)idx];
        break;
      }
      case Op::ArrayWrite: {
        auto& arr = heap_.array(R[in.a].ref).elems;
        int32_t idx = R[in.b].i;
        if (idx < 0 || (size_t)idx > arr.size()) {
          halt(res, RunStatus::Halted, "array index out of bounds");
          return false;
        }
        if ((size_t)idx == arr.size()) arr.push_back(R[in.c]);
        else arr[(size_t)idx] = R[in.c];
        break;
      }
      case Op::ArrayLen:
        R[in.dst] = Value::int32((int32_t)heap_.array(R[in.a].ref).elems.size());
        break;
      case Op::GetGlobal: {
        const auto& g = globals_[in.sym];
        if (!g) {
          halt(res, RunStatus::Halted,
               "undefined global '" + prog_.globals[in.sym].name + "'");
          return false;
        }
        R[in.dst] = *g;
        break;
      }
      case Op::SetGlobal: globals_[in.sym] = R[in.a]; break;
      case Op::ReadSlot: R[in.dst] = heap_.object(R[in.a].ref).slots[in.imm]; break;
      case Op::WriteSlot: heap_.object(R[in.a].ref).slots[in.imm] = R[in.b]; break;
      case Op::ShapeUpdate: {
        HeapObject& o = heap_.object(R[in.a].ref);
        o.shape = in.sym;
        o.slots.resize(shapes_.at(in.sym).propCount);
        break;
      }
      default:
        halt(res, RunStatus::Internal, "unexpected opcode in compiled code");
        return false;
    }
    return true;
  }

  Step exec_term(Version* v, ExecResult& res) {
    CTerm& t = v->term;
    Frame& fr = frames_.back();
    switch (t.k) {
      case CTerm::K::Jump:
        return {t.a, false};

      case CTerm::K::TagTest: {
        bool outcome = class_matches(runtime_tag(fr.regs[t.val]), t.cls);
        stats_.record_tag_test(t.site, outcome);
        return {outcome ? t.a : t.b, false};
      }

      case CTerm::K::CheckedJump: {
        bool actual = class_matches(runtime_tag(fr.regs[t.val]), t.cls);
        if (actual != t.expected)
          return halt(res, RunStatus::DeterminismViolation,
                      "removed tag test flipped outcome at site " +
                          std::to_string(t.site.site));
        return {t.a, false};
      }

      case CTerm::K::BoolTest: {
        const Value& c = fr.regs[t.val];
        ++stats_.boolBranches;
        if (c.is_true()) return {t.a, false};
        if (c.is_false()) return {t.b, false};
        return halt(res, RunStatus::Halted, "expected a boolean condition");
      }

      case CTerm::K::Ovf: {
        ++stats_.overflowChecks;
        const Instr& op = t.ovfOp;
        int32_t a = fr.regs[op.a].i, b = fr.regs[op.b].i, out = 0;
        bool ok = false;
        switch (op.op) {
          case Op::AddI32: ok = add_i32(a, b, &out); break;
          case Op::SubI32: ok = sub_i32(a, b, &out); break;
          case Op::MulI32: ok = mul_i32(a, b, &out); break;
          case Op::DivI32: ok = div_i32(a, b, &out); break;
          case Op::ModI32: ok = mod_i32(a, b, &out); break;
          default: return halt(res, RunStatus::Internal, "bad overflow op");
        }
        if (ok) {
          fr.regs[op.dst] = Value::int32(out);
          return {t.a, false};
        }
        return {t.b, false};
      }

      case CTerm::K::Dispatch:
        return exec_dispatch(v, t, res);

      case CTerm::K::Call:
        return exec_call(t, res);

      case CTerm::K::Ret:
        return exec_return(fr.regs[t.val], res);

      case CTerm::K::Halt: {
        std::string m = t.msg;
        if (t.val != kNoReg) m += ": " + format_value(fr.regs[t.val]);
        if (t.loc.line) m += " (line " + std::to_string(t.loc.line) + ")";
        return halt(res, RunStatus::Halted, m);
      }
    }
    return halt(res, RunStatus::Internal, "bad terminator");
  }

  // ---------- property dispatch ----------

  Step exec_dispatch(Version* v, CTerm& t, ExecResult& res) {
    Frame& fr = frames_.back();
    const Value& ov = fr.regs[t.obj];
    HeapObject& ho = heap_.object(ov.ref);
    for (PicEntry& e : t.pic) {
      ++stats_.dynShapeTests;
      if (e.shape == ho.shape) return dispatch_hit(e, t, fr);
    }
    // shape-miss stub: materialize a test for the observed shape
    PicEntry e;
    if (!build_pic_entry(v, t, ho.shape, &e, res)) return {nullptr, true};
    t.pic.push_back(e);
    ++stats_.compileEvents;
    ++stats_.emittedInstrTotal;
    ++stats_.emittedInstrRetained;
    ++stats_.dynShapeTests;
    return dispatch_hit(t.pic.back(), t, fr);
  }

  Step dispatch_hit(PicEntry& e, CTerm& t, Frame& fr) {
    HeapObject& ho = heap_.object(fr.regs[t.obj].ref);
    switch (e.kind) {
      case PicEntry::Kind::Read:
        fr.regs[t.dst] = ho.slots[e.slot];
        break;
      case PicEntry::Kind::WriteSame:
        ho.slots[e.slot] = fr.regs[t.wval];
        break;
      case PicEntry::Kind::WriteTrans:
        ho.shape = e.target;
        ho.slots.resize(shapes_.at(e.target).propCount);
        ho.slots[e.slot] = fr.regs[t.wval];
        break;
      case PicEntry::Kind::WriteGeneric:
        set_prop(ho, prog_.propNames[t.nameId], fr.regs[t.wval]);
        break;
    }
    return {e.resume, false};
  }

  bool build_pic_entry(Version* v, CTerm& t, ShapeId shape, PicEntry* out,
                       ExecResult& res) {
    const std::string& name = prog_.propNames[t.nameId];
    TypeContext ctx = t.ctxAtSite;
    out->shape = shape;
    if (t.access == PropAccess::Read) {
      auto info = shapes_.lookup(shape, name);
      if (!info) {
        halt(res, RunStatus::Halted, "missing property '" + name + "'");
        return false;
      }
      out->kind = PicEntry::Kind::Read;
      out->slot = info->slot;
      if (feat_.shapesInCtx) {
        ctx.set(t.obj, TypeTag::object(), shape);
        ctx.set(t.dst, info->tag);
      } else if (feat_.inference) {
        ctx.set(t.obj, TypeTag::object());
        ctx.drop(t.dst);
      }
      out->resume = request_version(v->fn, t.resumeBlock, ctx);
      return true;
    }
    if (!t.staticValTag.is_unknown()) {
      auto plan = shapes_.plan_write(shape, name, t.staticValTag);
      if (plan.target == shape) {
        out->kind = PicEntry::Kind::WriteSame;
        out->slot = plan.slot;
        if (feat_.shapesInCtx) ctx.set(t.obj, TypeTag::object(), shape);
      } else {
        out->kind = PicEntry::Kind::WriteTrans;
        out->slot = plan.slot;
        out->target = plan.target;
        if (feat_.shapesInCtx) {
          ctx.set(t.obj, TypeTag::object(), plan.target);
          drop_alias_shapes(ctx, t.obj);
        }
      }
    } else {
      out->kind = PicEntry::Kind::WriteGeneric;
      if (feat_.inference) {
        ctx.set(t.obj, TypeTag::object());
        drop_alias_shapes(ctx, t.obj);
        ctx.drop_shape(t.obj);
      }
    }
    out->resume = request_version(v->fn, t.resumeBlock, ctx);
    return true;
  }

  void set_prop(HeapObject& ho, const std::string& name, const Value& v) {
    auto plan = shapes_.plan_write(ho.shape, name, runtime_tag(v));
    ho.shape = plan.target;
    if (plan.grows) ho.slots.resize(shapes_.at(plan.target).propCount);
    ho.slots[plan.slot] = v;
  }

  // ---------- calls and returns ----------

  Step exec_call(CTerm& t, ExecResult& res) {
    Frame& fr = frames_.back();
    ++stats_.totalCalls;
    if (t.knownIdentity) ++stats_.knownCalleeCalls;

    FuncId fid;
    Version* entryVer = nullptr;
    if (t.entry) {
      fid = t.staticCallee;
      entryVer = t.entry->v;
    } else {
      const Value& cv = fr.regs[t.callee];
      if (cv.kind != ValKind::Closure)
        return halt(res, RunStatus::Halted,
                    "value is not callable: " + format_value(cv));
      fid = cv.ref;
      if (is_builtin(fid)) return exec_builtin(fid, t);
      entryVer = generic_entry(fid)->v;
    }
    if (is_builtin(fid)) return exec_builtin(fid, t);

    if (frames_.size() >= limits_.maxDepth)
      return halt(res, RunStatus::Halted, "stack overflow");

    const FunctionIR& callee = fnIR(fid);
    Value thisVal = fr.regs[t.thisArg];
    std::vector<Value> argv;
    argv.reserve(t.args.size());
    for (RegId a : t.args) argv.push_back(fr.regs[a]);

    Frame nf;
    nf.fn = fid;
    nf.regs.assign(callee.numRegs, Value::undefined());
    nf.regs[0] = thisVal;
    for (uint32_t i = 0; i < callee.paramCount; ++i)
      if (i < argv.size()) nf.regs[1 + i] = argv[i];
    nf.callTerm = &t;
    frames_.push_back(std::move(nf));
    return {entryVer, false};
  }

  Step exec_builtin(FuncId fid, CTerm& t) {
    Frame& fr = frames_.back();
    Value result;
    if (fnIR(fid).builtin == BuiltinKind::Print) {
      Value arg = t.args.empty() ? Value::undefined() : fr.regs[t.args[0]];
      output_ += format_value(arg);
      output_ += '\n';
      result = Value::undefined();
    } else {
      auto now = std::chrono::steady_clock::now().time_since_epoch();
      double ms =
          (double)std::chrono::duration_cast<std::chrono::microseconds>(now).count() /
          1000.0;
      result = Value::float64(ms);
    }
    ++stats_.totalReturns;
    fr.regs[t.dst] = result;
    return {continuation_version(t, fid), false};
  }

  Step exec_return(Value result, ExecResult& res) {
    ++stats_.totalReturns;
    const CTerm* call = frames_.back().callTerm;
    frames_.pop_back();
    if (!call) {
      res.status = RunStatus::Ok;
      res.result = result;
      return {nullptr, true};
    }
    Frame& caller = frames_.back();
    caller.regs[call->dst] = result;
    return {continuation_version(*const_cast<CTerm*>(call), call->staticCallee),
            false};
  }

  // Lazily compiled on the first return that targets this site. When the
  // callee is known and its memorized return type is still valid, the
  // continuation assumes that tag and registers itself for invalidation.
  Version* continuation_version(CTerm& call, FuncId returningHint) {
    (void)returningHint;
    ContRec* rec = call.cont;
    TypeTag assumed = TypeTag::unknown();
    if (feat_.contSpec && !rec->forcedUnknown && call.staticCallee != kNoFunc) {
      RetState& rs = fnState(call.staticCallee).ret;
      if (rs.st == RetStateKind::Known) assumed = rs.tag;
      else if (rs.st == RetStateKind::Unseen) ++stats_.contUnseenCalleeState;
    }
    if (!assumed.is_unknown()) ++stats_.returnTagKnownDynamic;

    TypeContext ctx;
    if (feat_.inference) {
      ctx = call.contBaseCtx;
      ctx.set(call.dst, assumed);
      ctx = ctx.restricted(fnIR(rec->callerFn).liveIn[rec->resumeBlock]);
    }
    ContextKey key = ctx.key();
    auto it = rec->versions.find(key);
    if (it != rec->versions.end()) return it->second;
    Version* v = new_version(rec->callerFn, rec->resumeBlock, std::move(ctx),
                             false, /*isCont=*/true);
    rec->versions.emplace(std::move(key), v);
    if (!assumed.is_unknown() && !rec->registered) {
      fnState(call.staticCallee).ret.dependents.insert(rec);
      rec->registered = true;
    }
    return v;
  }

  // ---------- output formatting ----------

  std::string format_value(const Value& v) {
    switch (v.kind) {
      case ValKind::Int32: return std::to_string(v.i);
      case ValKind::Float64: return number_text(v.f);
      case ValKind::Null: return "null";
      case ValKind::Const:
        return v.c == ConstVal::True ? "true"
               : v.c == ConstVal::False ? "false"
                                        : "undefined";
      case ValKind::String: return heap_.str(v.ref);
      case ValKind::Array: return "[array]";
      case ValKind::Object: return "[object]";
      case ValKind::Closure: return "[function " + fnIR(v.ref).name + "]";
    }
    return "?";
  }

  // ---------- reporting helpers ----------

  void finalize_stats() {
    stats_.versionsPerBlockHist.clear();
    stats_.entryPointsPerFunctionHist.clear();
    stats_.entryPointsDetail.clear();
    for (size_t f = 0; f < fnStates_.size(); ++f) {
      const FnState& st = fnStates_[f];
      for (size_t b = 0; b < st.nonGenericCount.size(); ++b) {
        uint32_t c = st.nonGenericCount[b];
        if (c || st.genericVers[b]) ++stats_.versionsPerBlockHist[c];
      }
      if (st.specializedEntries || st.genericEntry)
        ++stats_.entryPointsPerFunctionHist[st.specializedEntries];
      std::vector<std::pair<uint32_t, std::string>> lines;
      for (const auto& [key, rec] : st.entries)
        lines.push_back({rec->seq, prog_.functions[f].name + " " +
                                       rec->argCtx.describe_tags()});
      std::sort(lines.begin(), lines.end());
      for (auto& [seq, line] : lines) stats_.entryPointsDetail.push_back(line);
    }
  }

  void count_reachable(Version* root, EntrySummary* s) {
    std::set<const Version*> seen;
    std::vector<const Version*> work{root};
    while (!work.empty()) {
      const Version* v = work.back();
      work.pop_back();
      if (!v || seen.count(v)) continue;
      seen.insert(v);
      if (!v->compiled) continue;
      const CTerm& t = v->term;
      switch (t.k) {
        case CTerm::K::Jump:
        case CTerm::K::CheckedJump: work.push_back(t.a); break;
        case CTerm::K::TagTest:
          ++s->tagTests;
          work.push_back(t.a);
          work.push_back(t.b);
          break;
        case CTerm::K::BoolTest:
        case CTerm::K::Ovf:
          work.push_back(t.a);
          work.push_back(t.b);
          break;
        case CTerm::K::Dispatch:
          s->shapeTests += (uint32_t)t.pic.size();
          for (const PicEntry& e : t.pic) work.push_back(e.resume);
          break;
        case CTerm::K::Call:
          if (t.cont)
            for (const auto& [k, cv] : t.cont->versions) work.push_back(cv);
          break;
        case CTerm::K::Ret:
        case CTerm::K::Halt: break;
      }
    }
    uint32_t compiled = 0;
    for (const Version* v : seen)
      if (v->compiled) ++compiled;
    s->versions = compiled;
  }
};

inline std::string Engine::dump_versions() {
  std::ostringstream os;
  for (size_t f = 0; f < prog_.functions.size(); ++f) {
    const FunctionIR& fn = prog_.functions[f];
    if (fn.builtin != BuiltinKind::None) continue;
    FnState& st = fnStates_[f];
    bool any = st.genericEntry || st.specializedEntries;
    for (uint32_t c : st.nonGenericCount) any = any || c;
    for (Version* g : st.genericVers) any = any || g;
    if (!any) continue;
    os << "function f" << f << " " << fn.name << "\n";
    auto sums = entry_summaries((FuncId)f);
    for (const auto& s : sums) {
      os << "  entry " << (s.isGeneric ? "[generic]" : "[specialized]") << " args="
         << s.argTags << " tag_tests=" << s.tagTests
         << " shape_tests=" << s.shapeTests << " versions=" << s.versions << "\n";
    }
    for (size_t b = 0; b < fn.blocks.size(); ++b) {
      std::vector<std::pair<uint32_t, const Version*>> vers;
      for (const auto& [k, v] : st.blockVers[b]) vers.push_back({v->seq, v});
      if (st.genericVers[b]) vers.push_back({st.genericVers[b]->seq, st.genericVers[b]});
      if (vers.empty()) continue;
      std::sort(vers.begin(), vers.end(),
                [](auto& x, auto& y) { return x.first < y.first; });
      os << "  block b" << b << ": " << vers.size() << " version(s)\n";
      for (auto& [seq, v] : vers) {
        os << "    " << (v->isGeneric ? "[generic]" : "[specialized]") << " ctx="
           << v->ctx.describe_tags() << (v->compiled ? "" : " (stub)") << "\n";
      }
    }
  }
  return os.str();
}

}  // namespace bbvm
