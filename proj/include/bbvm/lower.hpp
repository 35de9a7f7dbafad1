#pragma once

#include <algorithm>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bbvm/ast.hpp"
#include "bbvm/ir.hpp"

namespace bbvm {

// Lowers the AST to per-function CFGs in which every dynamic type check is
// an explicit, countable branch. Polymorphic operators expand to tag-test
// cascades (left operand before right, int32 probed before float64);
// property accesses become lazily-extended shape-test sites. Lowering-time
// static tags come only from literals and construction expressions — no
// flow analysis happens here; that is the specializer's job.
class Lowerer {
 public:
  explicit Lowerer(const Ast& ast) : ast_(ast) {}

  ProgramIR run() {
    resolve();
    for (size_t i = 0; i < fns_.size(); ++i) lower_function((FuncId)i);
    for (FunctionIR& fn : prog_.functions)
      if (fn.builtin == BuiltinKind::None) compute_liveness(fn);
    return std::move(prog_);
  }

 private:
  struct ValT {
    RegId reg;
    TypeTag tag;
  };

  struct FnInfo {
    NodeId node = kNoNode;  // kNoNode for top-level
    std::string name;
    std::vector<std::string> params;
    std::vector<std::string> locals;
  };

  const Ast& ast_;
  ProgramIR prog_;
  std::vector<FnInfo> fns_;
  std::unordered_map<std::string, FuncId> declBindings_;  // top-level decls
  std::unordered_set<std::string> unstableGlobals_;       // assigned/rebound names

  // per-function lowering state
  FunctionIR* cur_ = nullptr;
  FnInfo* curInfo_ = nullptr;
  BlockId curBlock_ = kNoBlock;
  std::vector<bool> sealed_;
  std::unordered_map<std::string, RegId> localRegs_;
  RegId tempBase_ = 0;
  RegId tempNext_ = 0;

  // ---------- resolution ----------

  void resolve() {
    fns_.push_back(FnInfo{});  // main
    fns_[0].name = "(top)";
    // Function declarations are only legal as direct top-level statements;
    // function expressions may appear anywhere.
    for (NodeId s : ast_.at(ast_.root).children) {
      if (ast_.at(s).kind == NodeKind::FunctionDecl) register_decl(s);
      else collect_functions(s);
    }
    // collect locals and assignment targets
    for (size_t i = 0; i < fns_.size(); ++i) scan_body((FuncId)i);

    // builtins
    FuncId printId = (FuncId)fns_.size() + 0;
    FuncId clockId = (FuncId)fns_.size() + 1;
    prog_.functions.resize(fns_.size() + 2);
    for (size_t i = 0; i < fns_.size(); ++i) {
      prog_.functions[i].id = (FuncId)i;
      prog_.functions[i].name = fns_[i].name;
      prog_.functions[i].paramCount = (uint32_t)fns_[i].params.size();
    }
    FunctionIR& pf = prog_.functions[printId];
    pf.id = printId;
    pf.name = "print";
    pf.paramCount = 1;
    pf.builtin = BuiltinKind::Print;
    FunctionIR& cf = prog_.functions[clockId];
    cf.id = clockId;
    cf.name = "clock";
    cf.paramCount = 0;
    cf.builtin = BuiltinKind::Clock;
    prog_.printFn = printId;
    prog_.clockFn = clockId;

    prog_.global_id("undefined");
    bind_stable("print", printId);
    bind_stable("clock", clockId);
    for (const auto& [name, fid] : declBindings_) bind_stable(name, fid);
  }

  void bind_stable(const std::string& name, FuncId fid) {
    uint32_t gid = prog_.global_id(name);
    if (!unstableGlobals_.count(name)) prog_.globals[gid].stableClosure = fid;
  }

  void register_decl(NodeId id) {
    const AstNode& n = ast_.at(id);
    FnInfo info;
    info.node = id;
    info.name = n.text;
    for (int i = 0; i < n.ival; ++i)
      info.params.push_back(ast_.at(n.children[i]).text);
    check_params(info, n.loc);
    FuncId fid = (FuncId)fns_.size();
    fns_.push_back(std::move(info));
    if (declBindings_.count(n.text)) unstableGlobals_.insert(n.text);
    else declBindings_[n.text] = fid;
    collect_functions(ast_.at(id).children.back());
  }

  void collect_functions(NodeId id) {
    const AstNode& n = ast_.at(id);
    if (n.kind == NodeKind::FunctionDecl)
      throw LowerError(n.loc, "function declarations must be at top level");
    if (n.kind == NodeKind::FunctionExpr) {
      FnInfo info;
      info.node = id;
      info.name = n.text;
      for (int i = 0; i < n.ival; ++i)
        info.params.push_back(ast_.at(n.children[i]).text);
      check_params(info, n.loc);
      FuncId fid = (FuncId)fns_.size();
      fns_.push_back(std::move(info));
      fnOfExpr_[id] = fid;
      collect_functions(n.children.back());
      return;
    }
    for (NodeId c : n.children) collect_functions(c);
  }

  static void check_params(const FnInfo& info, SrcLoc loc) {
    for (size_t i = 0; i < info.params.size(); ++i)
      for (size_t j = i + 1; j < info.params.size(); ++j)
        if (info.params[i] == info.params[j])
          throw LowerError(loc, "duplicate parameter '" + info.params[i] + "'");
  }

  std::unordered_map<NodeId, FuncId> fnOfExpr_;

  // Collect `var` locals of one function and note every assignment that
  // targets a global name (those globals can never be stable closures).
  void scan_body(FuncId fid) {
    FnInfo& info = fns_[fid];
    NodeId body = info.node == kNoNode ? ast_.root : ast_.at(info.node).children.back();
    scan_stmts(body, info, fid == 0);
    // resolve assignment targets now that locals are known
    note_global_writes(body, info, fid == 0);
  }

  void scan_stmts(NodeId id, FnInfo& info, bool topLevel) {
    const AstNode& n = ast_.at(id);
    if (n.kind == NodeKind::FunctionExpr || n.kind == NodeKind::FunctionDecl) return;
    if (n.kind == NodeKind::VarDecl && n.ival == 1) {
      if (topLevel) {
        prog_.global_id(n.text);
      } else if (std::find(info.params.begin(), info.params.end(), n.text) ==
                     info.params.end() &&
                 std::find(info.locals.begin(), info.locals.end(), n.text) ==
                     info.locals.end()) {
        info.locals.push_back(n.text);
      }
    }
    for (NodeId c : n.children) scan_stmts(c, info, topLevel);
  }

  bool is_fn_local(const FnInfo& info, const std::string& name) const {
    return std::find(info.params.begin(), info.params.end(), name) !=
               info.params.end() ||
           std::find(info.locals.begin(), info.locals.end(), name) !=
               info.locals.end();
  }

  void note_global_writes(NodeId id, const FnInfo& info, bool topLevel) {
    const AstNode& n = ast_.at(id);
    if (n.kind == NodeKind::FunctionExpr || n.kind == NodeKind::FunctionDecl) return;
    bool isLocal = !topLevel && is_fn_local(info, n.text);
    if (n.kind == NodeKind::VarDecl && !isLocal) {
      prog_.global_id(n.text);
      unstableGlobals_.insert(n.text);
    }
    if (n.kind == NodeKind::Ident && !isLocal) prog_.global_id(n.text);
    for (NodeId c : n.children) note_global_writes(c, info, topLevel);
  }

  // ---------- per-function lowering ----------

  void lower_function(FuncId fid) {
    FnInfo& info = fns_[fid];
    FunctionIR& fn = prog_.functions[fid];
    cur_ = &fn;
    curInfo_ = &info;
    sealed_.clear();
    localRegs_.clear();
    fn.blocks.clear();

    // register layout: r0 = this, params, locals, temps
    RegId next = 1;
    for (const std::string& p : info.params) localRegs_[p] = next++;
    for (const std::string& l : info.locals)
      if (!localRegs_.count(l)) localRegs_[l] = next++;
    tempBase_ = next;
    tempNext_ = next;
    fn.numRegs = next;

    fn.entry = new_block();
    start(fn.entry);

    NodeId body;
    if (info.node == kNoNode) {
      body = ast_.root;
      // hoist top-level function declarations
      for (NodeId s : ast_.at(body).children) {
        const AstNode& d = ast_.at(s);
        if (d.kind != NodeKind::FunctionDecl) continue;
        RegId t = new_temp();
        emit({.op = Op::MakeClosure, .dst = t, .sym = declBindings_.at(d.text)});
        Instr sg{.op = Op::SetGlobal, .a = t};
        sg.sym = prog_.global_id(d.text);
        emit(sg);
      }
    } else {
      body = ast_.at(info.node).children.back();
      fn.loc = ast_.at(info.node).loc;
    }

    // locals start life as undefined
    for (const std::string& l : info.locals)
      emit({.op = Op::ConstUndef, .dst = localRegs_[l]});

    for (NodeId s : ast_.at(body).children) lower_stmt(s);
    if (!is_sealed()) {
      RegId t = new_temp();
      emit({.op = Op::ConstUndef, .dst = t});
      Terminator ret;
      ret.kind = TermKind::Return;
      ret.val = t;
      seal(std::move(ret));
    }
    // seal any dangling dead block
    for (size_t b = 0; b < fn.blocks.size(); ++b) {
      if (!sealed_[b]) {
        fn.blocks[b].term.kind = TermKind::Halt;
        fn.blocks[b].term.msg = "unreachable";
        sealed_[b] = true;
      }
    }
  }

  // ---------- block plumbing ----------

  BlockId new_block() {
    BlockId id = (BlockId)cur_->blocks.size();
    BasicBlock b;
    b.id = id;
    cur_->blocks.push_back(std::move(b));
    sealed_.push_back(false);
    return id;
  }

  void start(BlockId b) { curBlock_ = b; }
  bool is_sealed() const { return curBlock_ == kNoBlock || sealed_[curBlock_]; }

  void emit(Instr in) {
    cur_->blocks[curBlock_].instrs.push_back(in);
  }

  void seal(Terminator t) {
    if (sealed_[curBlock_]) throw InternalError("block sealed twice");
    cur_->blocks[curBlock_].term = std::move(t);
    sealed_[curBlock_] = true;
    curBlock_ = kNoBlock;
  }

  void seal_jump(BlockId target) {
    Terminator t;
    t.kind = TermKind::Jump;
    t.target = target;
    seal(std::move(t));
  }

  RegId new_temp() {
    RegId r = tempNext_++;
    if (tempNext_ > cur_->numRegs) cur_->numRegs = tempNext_;
    return r;
  }

  uint32_t new_tag_site() { return cur_->tagSiteCount++; }
  uint32_t new_shape_site() { return cur_->shapeSiteCount++; }
  uint32_t new_call_site() { return cur_->callSiteCount++; }

  // ---------- statements ----------

  void lower_stmt(NodeId id) {
    tempNext_ = tempBase_;
    const AstNode& n = ast_.at(id);
    if (is_sealed()) start(new_block());  // dead code after return/throw
    switch (n.kind) {
      case NodeKind::FunctionDecl:
        return;  // hoisted
      case NodeKind::VarDecl:
        lower_store(id);
        return;
      case NodeKind::ExprStmt: {
        const AstNode& e = ast_.at(n.children[0]);
        if (e.kind == NodeKind::VarDecl || e.kind == NodeKind::PropWrite ||
            e.kind == NodeKind::IndexWrite) {
          lower_store(n.children[0]);
        } else {
          lower_expr(n.children[0]);
        }
        return;
      }
      case NodeKind::If: {
        ValT c = lower_expr(n.children[0]);
        BlockId thenB = new_block();
        BlockId elseB = n.children.size() > 2 ? new_block() : kNoBlock;
        BlockId joinB = new_block();
        Terminator t;
        t.kind = TermKind::BoolTest;
        t.val = c.reg;
        t.target = thenB;
        t.altTarget = elseB == kNoBlock ? joinB : elseB;
        t.loc = n.loc;
        seal(std::move(t));
        start(thenB);
        lower_stmt(n.children[1]);
        if (!is_sealed()) seal_jump(joinB);
        if (elseB != kNoBlock) {
          start(elseB);
          lower_stmt(n.children[2]);
          if (!is_sealed()) seal_jump(joinB);
        }
        start(joinB);
        return;
      }
      case NodeKind::While: {
        BlockId condB = new_block();
        seal_jump(condB);
        start(condB);
        ValT c = lower_expr(n.children[0]);
        BlockId bodyB = new_block();
        BlockId exitB = new_block();
        Terminator t;
        t.kind = TermKind::BoolTest;
        t.val = c.reg;
        t.target = bodyB;
        t.altTarget = exitB;
        t.loc = n.loc;
        seal(std::move(t));
        start(bodyB);
        lower_stmt(n.children[1]);
        if (!is_sealed()) seal_jump(condB);
        start(exitB);
        return;
      }
      case NodeKind::Return: {
        if (curInfo_->node == kNoNode)
          throw LowerError(n.loc, "'return' outside a function");
        ValT v;
        if (!n.children.empty()) {
          v = lower_expr(n.children[0]);
        } else {
          v.reg = new_temp();
          v.tag = TypeTag::constant();
          emit({.op = Op::ConstUndef, .dst = v.reg});
        }
        Terminator t;
        t.kind = TermKind::Return;
        t.val = v.reg;
        t.loc = n.loc;
        seal(std::move(t));
        return;
      }
      case NodeKind::Throw: {
        ValT v = lower_expr(n.children[0]);
        Terminator t;
        t.kind = TermKind::Halt;
        t.msg = "uncaught throw";
        t.val = v.reg;
        t.loc = n.loc;
        seal(std::move(t));
        return;
      }
      case NodeKind::Block:
        for (NodeId s : n.children) lower_stmt(s);
        return;
      default:
        lower_expr(id);
        return;
    }
  }

  // VarDecl (decl or assign), PropWrite, IndexWrite
  void lower_store(NodeId id) {
    const AstNode& n = ast_.at(id);
    switch (n.kind) {
      case NodeKind::VarDecl: {
        ValT v;
        if (!n.children.empty()) {
          v = lower_expr(n.children[0]);
        } else {
          v.reg = new_temp();
          v.tag = TypeTag::constant();
          emit({.op = Op::ConstUndef, .dst = v.reg});
        }
        auto it = localRegs_.find(n.text);
        if (it != localRegs_.end()) {
          emit({.op = Op::Move, .dst = it->second, .a = v.reg});
        } else {
          Instr sg{.op = Op::SetGlobal, .a = v.reg};
          sg.sym = prog_.global_id(n.text);
          emit(sg);
        }
        return;
      }
      case NodeKind::PropWrite: {
        ValT obj = lower_expr(n.children[0]);
        ValT val = lower_expr(n.children[1]);
        lower_prop_write(obj, n.text, val, n.loc);
        return;
      }
      case NodeKind::IndexWrite: {
        ValT arr = lower_expr(n.children[0]);
        ValT idx = lower_expr(n.children[1]);
        ValT val = lower_expr(n.children[2]);
        arr = coerce_class(arr, TagClass::Array, "indexed store on non-array", n.loc);
        idx = coerce_class(idx, TagClass::Int32, "array index is not an int32", n.loc);
        emit({.op = Op::ArrayWrite, .a = arr.reg, .b = idx.reg, .c = val.reg});
        return;
      }
      default:
        throw InternalError("bad store node");
    }
  }

  // ---------- expressions ----------

  ValT lower_expr(NodeId id) {
    const AstNode& n = ast_.at(id);
    switch (n.kind) {
      case NodeKind::IntLit: {
        RegId t = new_temp();
        emit({.op = Op::ConstInt, .dst = t, .imm = n.ival});
        return {t, TypeTag::int32()};
      }
      case NodeKind::FloatLit: {
        RegId t = new_temp();
        emit({.op = Op::ConstFloat, .dst = t, .fimm = n.fval});
        return {t, TypeTag::float64()};
      }
      case NodeKind::StrLit: {
        RegId t = new_temp();
        Instr in{.op = Op::ConstStr, .dst = t};
        in.sym = prog_.intern_string(n.text);
        emit(in);
        return {t, TypeTag::string()};
      }
      case NodeKind::BoolLit: {
        RegId t = new_temp();
        emit({.op = Op::ConstBool, .dst = t, .imm = n.ival});
        return {t, TypeTag::constant()};
      }
      case NodeKind::NullLit: {
        RegId t = new_temp();
        emit({.op = Op::ConstNull, .dst = t});
        return {t, TypeTag::null()};
      }
      case NodeKind::This: {
        if (curInfo_->node == kNoNode)
          throw LowerError(n.loc, "'this' outside a function");
        return {(RegId)0, TypeTag::unknown()};
      }
      case NodeKind::Ident: {
        auto it = localRegs_.find(n.text);
        if (it != localRegs_.end()) return {it->second, TypeTag::unknown()};
        RegId t = new_temp();
        Instr in{.op = Op::GetGlobal, .dst = t};
        in.sym = prog_.global_id(n.text);
        emit(in);
        return {t, TypeTag::unknown()};
      }
      case NodeKind::FunctionExpr: {
        RegId t = new_temp();
        FuncId fid = fnOfExpr_.at(id);
        emit({.op = Op::MakeClosure, .dst = t, .sym = fid});
        return {t, TypeTag::closure(fid)};
      }
      case NodeKind::BinOp:
        switch (n.bin) {
          case BinKind::Add:
          case BinKind::Sub:
          case BinKind::Mul:
          case BinKind::Div:
          case BinKind::Mod: {
            ValT l = lower_expr(n.children[0]);
            ValT r = lower_expr(n.children[1]);
            return lower_arith(n.bin, l, r, n.loc);
          }
          case BinKind::Eq:
          case BinKind::Ne: {
            ValT l = lower_expr(n.children[0]);
            ValT r = lower_expr(n.children[1]);
            return lower_eq(n.bin == BinKind::Ne, l, r, n.loc);
          }
          case BinKind::Lt:
          case BinKind::Le:
          case BinKind::Gt:
          case BinKind::Ge: {
            ValT l = lower_expr(n.children[0]);
            ValT r = lower_expr(n.children[1]);
            return lower_rel(n.bin, l, r, n.loc);
          }
          case BinKind::And:
          case BinKind::Or:
            return lower_logic(n.bin == BinKind::And, n.children[0], n.children[1], n.loc);
        }
        throw InternalError("bad binop");
      case NodeKind::UnOp:
        if (n.un == UnKind::Not) return lower_not(n.children[0], n.loc);
        return lower_neg(n.children[0], n.loc);
      case NodeKind::PropRead: {
        ValT obj = lower_expr(n.children[0]);
        return lower_prop_read(obj, n.text, n.loc);
      }
      case NodeKind::IndexRead: {
        ValT arr = lower_expr(n.children[0]);
        ValT idx = lower_expr(n.children[1]);
        arr = coerce_class(arr, TagClass::Array, "indexed read on non-array", n.loc);
        idx = coerce_class(idx, TagClass::Int32, "array index is not an int32", n.loc);
        RegId t = new_temp();
        emit({.op = Op::ArrayRead, .dst = t, .a = arr.reg, .b = idx.reg});
        return {t, TypeTag::unknown()};  // arrays are untyped black boxes
      }
      case NodeKind::ArrayLit: {
        RegId t = new_temp();
        Instr in{.op = Op::AllocArray, .dst = t};
        in.sym = (uint32_t)n.children.size();
        emit(in);
        for (size_t i = 0; i < n.children.size(); ++i) {
          ValT v = lower_expr(n.children[i]);
          RegId ix = new_temp();
          emit({.op = Op::ConstInt, .dst = ix, .imm = (int32_t)i});
          emit({.op = Op::ArrayWrite, .a = t, .b = ix, .c = v.reg});
        }
        return {t, TypeTag::array()};
      }
      case NodeKind::ObjectLit: {
        RegId t = new_temp();
        emit({.op = Op::AllocObject, .dst = t});
        for (size_t i = 0; i < n.children.size(); ++i) {
          ValT v = lower_expr(n.children[i]);
          lower_prop_write({t, TypeTag::object()}, n.names[i], v, n.loc);
        }
        return {t, TypeTag::object()};
      }
      case NodeKind::Call: {
        ValT callee = lower_expr(n.children[0]);
        std::vector<RegId> args;
        for (size_t i = 1; i < n.children.size(); ++i)
          args.push_back(lower_expr(n.children[i]).reg);
        RegId thisR = new_temp();
        emit({.op = Op::ConstUndef, .dst = thisR});
        return emit_call(callee.reg, thisR, std::move(args), false, n.loc);
      }
      case NodeKind::MethodCall: {
        ValT obj = lower_expr(n.children[0]);
        ValT m = lower_prop_read(obj, n.text, n.loc);
        std::vector<RegId> args;
        for (size_t i = 1; i < n.children.size(); ++i)
          args.push_back(lower_expr(n.children[i]).reg);
        return emit_call(m.reg, obj.reg, std::move(args), false, n.loc);
      }
      case NodeKind::New: {
        ValT callee = lower_expr(n.children[0]);
        std::vector<RegId> args;
        for (size_t i = 1; i < n.children.size(); ++i)
          args.push_back(lower_expr(n.children[i]).reg);
        RegId objR = new_temp();
        emit({.op = Op::AllocObject, .dst = objR});
        emit_call(callee.reg, objR, std::move(args), true, n.loc);
        return {objR, TypeTag::object()};
      }
      default:
        throw InternalError("unexpected node in expression position");
    }
  }

  ValT emit_call(RegId callee, RegId thisR, std::vector<RegId> args, bool isCtor,
                 SrcLoc loc) {
    RegId dst = new_temp();
    BlockId resume = new_block();
    Terminator t;
    t.kind = TermKind::Call;
    t.callee = callee;
    t.thisArg = thisR;
    t.args = std::move(args);
    t.dst = dst;
    t.target = resume;
    t.callSiteId = new_call_site();
    t.isCtor = isCtor;
    t.loc = loc;
    seal(std::move(t));
    start(resume);
    return {dst, TypeTag::unknown()};
  }

  // ---------- tag-test cascades ----------

  static std::optional<TagClass> class_of(const TypeTag& t) {
    switch (t.kind) {
      case TagKind::Int32: return TagClass::Int32;
      case TagKind::Float64: return TagClass::Float64;
      case TagKind::Null: return TagClass::Null;
      case TagKind::Const: return TagClass::Const;
      case TagKind::String: return TagClass::String;
      case TagKind::Array: return TagClass::Array;
      case TagKind::ClosureKnown:
      case TagKind::ClosureUnknown: return TagClass::Closure;
      case TagKind::Object: return TagClass::Object;
      case TagKind::Unknown: return std::nullopt;
    }
    return std::nullopt;
  }

  struct Arm {
    TagClass cls;
    BlockId block;
  };

  static constexpr uint32_t kFreshSite = 0xffffffff;

  // Emits the probe chain classifying `v` against `classes` in order.
  // Statically-tagged values route directly with no probes. Returns the
  // arm entry blocks plus a fallback block for "none of the above"; arms
  // that are statically impossible are omitted. The current block is
  // consumed; the caller fills each returned block. One source operand is
  // one classification site: when an operand is re-classified on several
  // paths (the right operand of a binary operator, once per left arm), the
  // caller passes the operand's site so all paths share it.
  std::vector<Arm> classify(const ValT& v, std::initializer_list<TagClass> classes,
                            BlockId* fallbackOut, SrcLoc loc,
                            uint32_t site = kFreshSite) {
    std::vector<Arm> arms;
    if (auto cls = class_of(v.tag)) {
      bool inSet = false;
      for (TagClass c : classes)
        if (c == *cls) inSet = true;
      if (inSet) {
        BlockId b = new_block();
        seal_jump(b);
        arms.push_back({*cls, b});
        *fallbackOut = kNoBlock;
      } else {
        BlockId fb = new_block();
        seal_jump(fb);
        *fallbackOut = fb;
      }
      return arms;
    }
    if (site == kFreshSite) site = new_tag_site();
    for (TagClass c : classes) {
      BlockId armB = new_block();
      BlockId nextB = new_block();
      Terminator t;
      t.kind = TermKind::TagTest;
      t.val = v.reg;
      t.tagClass = c;
      // probe index is the class's canonical position, so one (site, probe)
      // pair always asks the same question even across duplicated paths
      t.site = {site, (uint32_t)c};
      t.target = armB;
      t.altTarget = nextB;
      t.loc = loc;
      seal(std::move(t));
      arms.push_back({c, armB});
      start(nextB);
    }
    BlockId fb = curBlock_;
    curBlock_ = kNoBlock;
    *fallbackOut = fb;
    return arms;
  }

  void seal_halt(BlockId b, const std::string& msg, SrcLoc loc) {
    if (b == kNoBlock) return;
    start(b);
    Terminator t;
    t.kind = TermKind::Halt;
    t.msg = msg;
    t.loc = loc;
    seal(std::move(t));
  }

  // Ensures `v` is of the given class, probing if statically unknown.
  // Used where the language defines no fallback (array indices etc.).
  ValT coerce_class(ValT v, TagClass cls, const std::string& err, SrcLoc loc) {
    if (auto c = class_of(v.tag)) {
      if (*c != cls) throw LowerError(loc, err + " (statically " + tag_name(v.tag) + ")");
      return v;
    }
    BlockId fb = kNoBlock;
    auto arms = classify(v, {cls}, &fb, loc);
    seal_halt(fb, err, loc);
    start(arms[0].block);
    TypeTag t = cls == TagClass::Int32 ? TypeTag::int32()
                : cls == TagClass::Array ? TypeTag::array()
                                         : TypeTag::unknown();
    return {v.reg, t};
  }

  struct OvfPair {
    Op intOp;
    Op fltOp;
  };

  static OvfPair arith_ops(BinKind k) {
    switch (k) {
      case BinKind::Add: return {Op::AddI32, Op::AddF64};
      case BinKind::Sub: return {Op::SubI32, Op::SubF64};
      case BinKind::Mul: return {Op::MulI32, Op::MulF64};
      case BinKind::Div: return {Op::DivI32, Op::DivF64};
      case BinKind::Mod: return {Op::ModI32, Op::AddF64};  // float arm unused
      default: throw InternalError("not an arith op");
    }
  }

  static const char* op_text(BinKind k) {
    switch (k) {
      case BinKind::Add: return "+";
      case BinKind::Sub: return "-";
      case BinKind::Mul: return "*";
      case BinKind::Div: return "/";
      case BinKind::Mod: return "%";
      default: return "?";
    }
  }

  // Integer arithmetic with its overflow companion. The overflow arm
  // recomputes in float64, except for % and / whose slow arms differ.
  void emit_int_arith(BinKind k, RegId a, RegId b, RegId dst, BlockId merge, SrcLoc loc) {
    OvfPair ops = arith_ops(k);
    BlockId okB = new_block();
    BlockId ovfB = new_block();
    Terminator t;
    t.kind = TermKind::OverflowTest;
    t.ovfOp = {.op = ops.intOp, .dst = dst, .a = a, .b = b};
    t.target = okB;
    t.altTarget = ovfB;
    t.loc = loc;
    seal(std::move(t));
    start(okB);
    seal_jump(merge);
    start(ovfB);
    if (k == BinKind::Mod) {
      Terminator h;
      h.kind = TermKind::Halt;
      h.msg = "modulo by zero";
      h.loc = loc;
      seal(std::move(h));
      return;
    }
    RegId fa = new_temp();
    RegId fb2 = new_temp();
    emit({.op = Op::I32toF64, .dst = fa, .a = a});
    emit({.op = Op::I32toF64, .dst = fb2, .a = b});
    emit({.op = ops.fltOp, .dst = dst, .a = fa, .b = fb2});
    seal_jump(merge);
  }

  void emit_float_arith(BinKind k, RegId a, RegId b, RegId dst, BlockId merge,
                        bool convA, bool convB) {
    OvfPair ops = arith_ops(k);
    RegId fa = a, fb = b;
    if (convA) {
      fa = new_temp();
      emit({.op = Op::I32toF64, .dst = fa, .a = a});
    }
    if (convB) {
      fb = new_temp();
      emit({.op = Op::I32toF64, .dst = fb, .a = b});
    }
    emit({.op = ops.fltOp, .dst = dst, .a = fa, .b = fb});
    seal_jump(merge);
  }

  ValT lower_arith(BinKind k, ValT l, ValT r, SrcLoc loc) {
    RegId dst = new_temp();
    BlockId merge = new_block();
    std::string err = std::string("unsupported operand types for '") + op_text(k) + "'";

    bool allowStr = k == BinKind::Add;
    bool intOnly = k == BinKind::Mod;

    BlockId lFall = kNoBlock;
    std::vector<Arm> lArms =
        intOnly ? classify(l, {TagClass::Int32}, &lFall, loc)
        : allowStr
            ? classify(l, {TagClass::Int32, TagClass::Float64, TagClass::String},
                       &lFall, loc)
            : classify(l, {TagClass::Int32, TagClass::Float64}, &lFall, loc);
    seal_halt(lFall, err, loc);

    // the right operand is one classification site across all left arms
    uint32_t rsite = class_of(r.tag) ? kFreshSite : new_tag_site();

    for (const Arm& la : lArms) {
      start(la.block);
      switch (la.cls) {
        case TagClass::Int32: {
          BlockId rFall = kNoBlock;
          auto rArms = intOnly
                           ? classify(r, {TagClass::Int32}, &rFall, loc, rsite)
                           : classify(r, {TagClass::Int32, TagClass::Float64},
                                      &rFall, loc, rsite);
          seal_halt(rFall, err, loc);
          for (const Arm& ra : rArms) {
            start(ra.block);
            if (ra.cls == TagClass::Int32) {
              emit_int_arith(k, l.reg, r.reg, dst, merge, loc);
            } else {
              emit_float_arith(k, l.reg, r.reg, dst, merge, true, false);
            }
          }
          break;
        }
        case TagClass::Float64: {
          BlockId rFall = kNoBlock;
          auto rArms = classify(r, {TagClass::Int32, TagClass::Float64}, &rFall,
                                loc, rsite);
          seal_halt(rFall, err, loc);
          for (const Arm& ra : rArms) {
            start(ra.block);
            emit_float_arith(k, l.reg, r.reg, dst, merge, false,
                             ra.cls == TagClass::Int32);
          }
          break;
        }
        case TagClass::String: {
          BlockId rFall = kNoBlock;
          auto rArms = classify(r, {TagClass::String}, &rFall, loc, rsite);
          seal_halt(rFall, err, loc);
          for (const Arm& ra : rArms) {
            start(ra.block);
            emit({.op = Op::StrConcat, .dst = dst, .a = l.reg, .b = r.reg});
            seal_jump(merge);
          }
          break;
        }
        default:
          throw InternalError("unexpected arith arm");
      }
    }
    start(merge);
    TypeTag out = intOnly ? TypeTag::int32() : TypeTag::unknown();
    return {dst, out};
  }

  // == and != ; type-strict except null==null and int32/float64 numeric
  // comparison. Never halts: mismatched categories compare unequal.
  ValT lower_eq(bool neg, ValT l, ValT r, SrcLoc loc) {
    RegId dst = new_temp();
    BlockId merge = new_block();

    auto emit_bool = [&](bool v) {
      emit({.op = Op::ConstBool, .dst = dst, .imm = (v != neg) ? 1 : 0});
      seal_jump(merge);
    };

    // fast shape: one side statically null -> single null probe on the other
    if (l.tag.kind == TagKind::Null || r.tag.kind == TagKind::Null) {
      ValT other = l.tag.kind == TagKind::Null ? r : l;
      if (auto c = class_of(other.tag)) {
        emit_bool(*c == TagClass::Null);
        start(merge);
        return {dst, TypeTag::constant()};
      }
      BlockId fb = kNoBlock;
      auto arms = classify(other, {TagClass::Null}, &fb, loc);
      start(arms[0].block);
      emit_bool(true);
      start(fb);
      emit_bool(false);
      start(merge);
      return {dst, TypeTag::constant()};
    }

    CmpKind ck = neg ? CmpKind::Ne : CmpKind::Eq;

    // per-class comparison emitters; `neg` folds into the compare kind
    auto compare_same = [&](TagClass cls) {
      switch (cls) {
        case TagClass::Int32:
          emit({.op = Op::CmpI32, .dst = dst, .a = l.reg, .b = r.reg, .imm = (int)ck});
          break;
        case TagClass::Float64:
          emit({.op = Op::CmpF64, .dst = dst, .a = l.reg, .b = r.reg, .imm = (int)ck});
          break;
        case TagClass::String:
          emit({.op = Op::StrEq, .dst = dst, .a = l.reg, .b = r.reg, .imm = (int)ck});
          break;
        case TagClass::Null:
          emit({.op = Op::ConstBool, .dst = dst, .imm = neg ? 0 : 1});
          break;
        default:
          emit({.op = Op::CmpRef, .dst = dst, .a = l.reg, .b = r.reg, .imm = (int)ck});
          break;
      }
      seal_jump(merge);
    };

    auto compare_numeric_mixed = [&](bool leftIsInt) {
      RegId conv = new_temp();
      emit({.op = Op::I32toF64, .dst = conv, .a = leftIsInt ? l.reg : r.reg});
      Instr in{.op = Op::CmpF64, .dst = dst, .imm = (int)ck};
      in.a = leftIsInt ? conv : l.reg;
      in.b = leftIsInt ? r.reg : conv;
      emit(in);
      seal_jump(merge);
    };

    // the right operand is one classification site across all left arms
    uint32_t rsite = class_of(r.tag) ? kFreshSite : new_tag_site();

    // classify left (unless static), then match right against the result
    auto right_side = [&](TagClass leftCls) {
      if (auto rc = class_of(r.tag)) {
        if (*rc == leftCls) compare_same(leftCls);
        else if (leftCls == TagClass::Int32 && *rc == TagClass::Float64)
          compare_numeric_mixed(true);
        else if (leftCls == TagClass::Float64 && *rc == TagClass::Int32)
          compare_numeric_mixed(false);
        else emit_bool(false);
        return;
      }
      if (leftCls == TagClass::Int32 || leftCls == TagClass::Float64) {
        BlockId fb = kNoBlock;
        TagClass other = leftCls == TagClass::Int32 ? TagClass::Float64 : TagClass::Int32;
        auto arms = classify(r, {leftCls, other}, &fb, loc, rsite);
        start(arms[0].block);
        compare_same(leftCls);
        start(arms[1].block);
        compare_numeric_mixed(leftCls == TagClass::Int32);
        start(fb);
        emit_bool(false);
      } else {
        BlockId fb = kNoBlock;
        auto arms = classify(r, {leftCls}, &fb, loc, rsite);
        start(arms[0].block);
        compare_same(leftCls);
        start(fb);
        emit_bool(false);
      }
    };

    if (auto lc = class_of(l.tag)) {
      right_side(*lc);
    } else {
      BlockId fb = kNoBlock;
      auto arms = classify(l,
                           {TagClass::Int32, TagClass::Float64, TagClass::Null,
                            TagClass::Const, TagClass::String, TagClass::Array,
                            TagClass::Closure},
                           &fb, loc);
      for (const Arm& a : arms) {
        start(a.block);
        right_side(a.cls);
      }
      // fallback: left is an object
      start(fb);
      right_side(TagClass::Object);
    }
    start(merge);
    return {dst, TypeTag::constant()};
  }

  ValT lower_rel(BinKind k, ValT l, ValT r, SrcLoc loc) {
    RegId dst = new_temp();
    BlockId merge = new_block();
    CmpKind ck = k == BinKind::Lt ? CmpKind::Lt
                 : k == BinKind::Le ? CmpKind::Le
                 : k == BinKind::Gt ? CmpKind::Gt
                                    : CmpKind::Ge;
    std::string err = "relational comparison on non-numeric value";

    BlockId lFall = kNoBlock;
    auto lArms = classify(l, {TagClass::Int32, TagClass::Float64}, &lFall, loc);
    seal_halt(lFall, err, loc);
    uint32_t rsite = class_of(r.tag) ? kFreshSite : new_tag_site();
    for (const Arm& la : lArms) {
      start(la.block);
      BlockId rFall = kNoBlock;
      auto rArms =
          classify(r, {TagClass::Int32, TagClass::Float64}, &rFall, loc, rsite);
      seal_halt(rFall, err, loc);
      for (const Arm& ra : rArms) {
        start(ra.block);
        if (la.cls == TagClass::Int32 && ra.cls == TagClass::Int32) {
          emit({.op = Op::CmpI32, .dst = dst, .a = l.reg, .b = r.reg, .imm = (int)ck});
          seal_jump(merge);
        } else {
          RegId fa = l.reg, fb = r.reg;
          if (la.cls == TagClass::Int32) {
            fa = new_temp();
            emit({.op = Op::I32toF64, .dst = fa, .a = l.reg});
          }
          if (ra.cls == TagClass::Int32) {
            fb = new_temp();
            emit({.op = Op::I32toF64, .dst = fb, .a = r.reg});
          }
          emit({.op = Op::CmpF64, .dst = dst, .a = fa, .b = fb, .imm = (int)ck});
          seal_jump(merge);
        }
      }
    }
    start(merge);
    return {dst, TypeTag::constant()};
  }

  // Short-circuit && and ||. Operands must evaluate to booleans at run
  // time; the result is normalized to a fresh boolean.
  ValT lower_logic(bool isAnd, NodeId lhs, NodeId rhs, SrcLoc loc) {
    RegId dst = new_temp();
    BlockId merge = new_block();
    ValT l = lower_expr(lhs);
    BlockId evalRhs = new_block();
    BlockId shortB = new_block();
    Terminator t;
    t.kind = TermKind::BoolTest;
    t.val = l.reg;
    t.target = isAnd ? evalRhs : shortB;
    t.altTarget = isAnd ? shortB : evalRhs;
    t.loc = loc;
    seal(std::move(t));

    start(shortB);
    emit({.op = Op::ConstBool, .dst = dst, .imm = isAnd ? 0 : 1});
    seal_jump(merge);

    start(evalRhs);
    ValT r = lower_expr(rhs);
    BlockId rTrue = new_block();
    BlockId rFalse = new_block();
    Terminator t2;
    t2.kind = TermKind::BoolTest;
    t2.val = r.reg;
    t2.target = rTrue;
    t2.altTarget = rFalse;
    t2.loc = loc;
    seal(std::move(t2));
    start(rTrue);
    emit({.op = Op::ConstBool, .dst = dst, .imm = 1});
    seal_jump(merge);
    start(rFalse);
    emit({.op = Op::ConstBool, .dst = dst, .imm = 0});
    seal_jump(merge);

    start(merge);
    return {dst, TypeTag::constant()};
  }

  ValT lower_not(NodeId e, SrcLoc loc) {
    ValT v = lower_expr(e);
    RegId dst = new_temp();
    BlockId merge = new_block();
    BlockId tB = new_block();
    BlockId fB = new_block();
    Terminator t;
    t.kind = TermKind::BoolTest;
    t.val = v.reg;
    t.target = tB;
    t.altTarget = fB;
    t.loc = loc;
    seal(std::move(t));
    start(tB);
    emit({.op = Op::ConstBool, .dst = dst, .imm = 0});
    seal_jump(merge);
    start(fB);
    emit({.op = Op::ConstBool, .dst = dst, .imm = 1});
    seal_jump(merge);
    start(merge);
    return {dst, TypeTag::constant()};
  }

  ValT lower_neg(NodeId e, SrcLoc loc) {
    ValT v = lower_expr(e);
    RegId dst = new_temp();
    BlockId merge = new_block();
    BlockId fall = kNoBlock;
    auto arms = classify(v, {TagClass::Int32, TagClass::Float64}, &fall, loc);
    seal_halt(fall, "unary '-' on non-numeric value", loc);
    for (const Arm& a : arms) {
      start(a.block);
      if (a.cls == TagClass::Int32) {
        RegId zero = new_temp();
        emit({.op = Op::ConstInt, .dst = zero, .imm = 0});
        emit_int_arith(BinKind::Sub, zero, v.reg, dst, merge, loc);
      } else {
        RegId zero = new_temp();
        emit({.op = Op::ConstFloat, .dst = zero, .fimm = 0.0});
        emit({.op = Op::SubF64, .dst = dst, .a = zero, .b = v.reg});
        seal_jump(merge);
      }
    }
    start(merge);
    return {dst, TypeTag::unknown()};
  }

  // ---------- property access ----------

  // Class-checks the receiver (a counted probe when statically unknown),
  // then anchors the extensible shape-test site. Reads of `length` on
  // arrays are served by the array arm.
  ValT lower_prop_read(ValT obj, const std::string& name, SrcLoc loc) {
    RegId dst = new_temp();
    BlockId merge = new_block();
    BlockId fall = kNoBlock;
    std::vector<Arm> arms;
    if (name == "length") {
      arms = classify(obj, {TagClass::Object, TagClass::Array}, &fall, loc);
    } else {
      arms = classify(obj, {TagClass::Object}, &fall, loc);
    }
    seal_halt(fall, "property access on non-object", loc);
    for (const Arm& a : arms) {
      start(a.block);
      if (a.cls == TagClass::Array) {
        emit({.op = Op::ArrayLen, .dst = dst, .a = obj.reg});
        seal_jump(merge);
        continue;
      }
      Terminator t;
      t.kind = TermKind::ShapeTest;
      t.shapeSiteId = new_shape_site();
      t.obj = obj.reg;
      t.nameId = prog_.intern_prop(name);
      t.access = PropAccess::Read;
      t.dst = dst;
      t.target = merge;
      t.loc = loc;
      seal(std::move(t));
    }
    start(merge);
    return {dst, TypeTag::unknown()};
  }

  void lower_prop_write(ValT obj, const std::string& name, ValT val, SrcLoc loc) {
    BlockId merge = new_block();
    BlockId fall = kNoBlock;
    auto arms = classify(obj, {TagClass::Object}, &fall, loc);
    seal_halt(fall, "property store on non-object", loc);
    for (const Arm& a : arms) {
      start(a.block);
      Terminator t;
      t.kind = TermKind::ShapeTest;
      t.shapeSiteId = new_shape_site();
      t.obj = obj.reg;
      t.nameId = prog_.intern_prop(name);
      t.access = PropAccess::Write;
      t.wval = val.reg;
      t.target = merge;
      t.loc = loc;
      seal(std::move(t));
    }
    start(merge);
  }

  // ---------- liveness ----------

  void compute_liveness(FunctionIR& fn) {
    size_t n = fn.blocks.size();
    std::vector<std::vector<uint32_t>> liveIn(n), liveOut(n);
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t bi = n; bi-- > 0;) {
        const BasicBlock& b = fn.blocks[bi];
        std::vector<uint32_t> out;
        auto addSucc = [&](BlockId s) {
          if (s == kNoBlock) return;
          for (uint32_t v : liveIn[s]) out.push_back(v);
        };
        switch (b.term.kind) {
          case TermKind::Jump: addSucc(b.term.target); break;
          case TermKind::TagTest:
          case TermKind::BoolTest:
          case TermKind::OverflowTest:
            addSucc(b.term.target);
            addSucc(b.term.altTarget);
            break;
          case TermKind::ShapeTest:
          case TermKind::Call: addSucc(b.term.target); break;
          case TermKind::Return:
          case TermKind::Halt: break;
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());

        // kill defs / add uses backward through the block
        std::vector<uint32_t> live = out;
        auto kill = [&](RegId r) {
          if (r == kNoReg) return;
          auto it = std::lower_bound(live.begin(), live.end(), (uint32_t)r);
          if (it != live.end() && *it == (uint32_t)r) live.erase(it);
        };
        auto use = [&](RegId r) {
          if (r == kNoReg) return;
          auto it = std::lower_bound(live.begin(), live.end(), (uint32_t)r);
          if (it == live.end() || *it != (uint32_t)r) live.insert(it, (uint32_t)r);
        };
        // terminator first (it executes last)
        const Terminator& t = b.term;
        switch (t.kind) {
          case TermKind::TagTest:
          case TermKind::BoolTest: use(t.val); break;
          case TermKind::OverflowTest:
            kill(t.ovfOp.dst);
            use(t.ovfOp.a);
            use(t.ovfOp.b);
            break;
          case TermKind::ShapeTest:
            if (t.access == PropAccess::Read) kill(t.dst);
            use(t.obj);
            if (t.access == PropAccess::Write) use(t.wval);
            break;
          case TermKind::Call:
            kill(t.dst);
            use(t.callee);
            use(t.thisArg);
            for (RegId a : t.args) use(a);
            break;
          case TermKind::Return: use(t.val); break;
          case TermKind::Halt:
            if (t.val != kNoReg) use(t.val);
            break;
          case TermKind::Jump: break;
        }
        for (size_t ii = b.instrs.size(); ii-- > 0;) {
          const Instr& in = b.instrs[ii];
          kill(in.dst);
          use(in.a);
          use(in.b);
          use(in.c);
        }
        if (live != liveIn[bi]) {
          liveIn[bi] = std::move(live);
          changed = true;
        }
        liveOut[bi] = std::move(out);
      }
    }
    fn.liveIn = std::move(liveIn);
  }
};

inline ProgramIR lower(const Ast& ast) { return Lowerer(ast).run(); }

}  // namespace bbvm
