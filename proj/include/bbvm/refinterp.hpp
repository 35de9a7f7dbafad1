#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "bbvm/ast.hpp"
#include "bbvm/value.hpp"  // number_text only; values here are independent

namespace bbvm {

// Untyped reference interpreter over the AST. This is the behavioral oracle
// for the differential suites: it shares nothing with the VM's object model
// (objects are naive name -> value association lists, there are no shapes,
// no IR and no specialization). It counts an implicit tag test wherever the
// lowering emits a countable probe: literals and construction expressions
// are statically typed, everything else pays classification probes in the
// same fixed order the lowered cascades use.
class RefInterp {
 public:
  struct RObjData;
  struct RArrData;
  using RObj = std::shared_ptr<RObjData>;
  using RArr = std::shared_ptr<RArrData>;

  enum class K : uint8_t { Int, Flt, Null, Bool, Undef, Str, Arr, Obj, Fn };

  struct RVal {
    K k = K::Undef;
    int32_t i = 0;
    double f = 0;
    bool b = false;
    std::string s;
    RArr arr;
    RObj obj;
    NodeId fn = kNoNode;  // FunctionDecl/FunctionExpr node

    static RVal integer(int32_t v) { RVal x; x.k = K::Int; x.i = v; return x; }
    static RVal flt(double v) { RVal x; x.k = K::Flt; x.f = v; return x; }
    static RVal null() { RVal x; x.k = K::Null; return x; }
    static RVal boolean(bool v) { RVal x; x.k = K::Bool; x.b = v; return x; }
    static RVal undef() { return RVal(); }
    static RVal str(std::string v) { RVal x; x.k = K::Str; x.s = std::move(v); return x; }
  };

  struct RObjData {
    std::vector<std::pair<std::string, RVal>> props;
    RVal* find(const std::string& n) {
      for (auto& [k, v] : props)
        if (k == n) return &v;
      return nullptr;
    }
  };
  struct RArrData {
    std::vector<RVal> elems;
  };

  struct Halt {
    std::string msg;
  };

  struct Result {
    bool halted = false;
    std::string message;
    std::string output;
    uint64_t implicitTests = 0;
    RVal value;  // value of the last top-level expression statement
  };

  explicit RefInterp(const Ast& ast) : ast_(ast) {}

  Result run() {
    Result res;
    try {
      collect_decls();
      globals_["undefined"] = RVal::undef();
      RVal printFn;
      printFn.k = K::Fn;
      printFn.fn = kNoNode;
      printFn.s = "print";
      globals_["print"] = printFn;
      RVal clockFn = printFn;
      clockFn.s = "clock";
      globals_["clock"] = clockFn;
      Scope top;
      top.isTop = true;
      exec_block(ast_.root, top);
    } catch (const Halt& h) {
      res.halted = true;
      res.message = h.msg;
    }
    res.output = std::move(out_);
    res.implicitTests = tests_;
    return res;
  }

 private:
  struct Scope {
    bool isTop = false;
    RVal thisVal;
    std::unordered_map<std::string, RVal> locals;
    std::vector<std::string> paramNames;  // locals includes params
  };

  struct ReturnSignal {
    RVal v;
  };

  const Ast& ast_;
  std::unordered_map<std::string, RVal> globals_;
  std::unordered_map<std::string, NodeId> decls_;
  std::string out_;
  uint64_t tests_ = 0;
  uint32_t depth_ = 0;
  uint64_t steps_ = 0;

  void collect_decls() {
    for (NodeId s : ast_.at(ast_.root).children) {
      const AstNode& n = ast_.at(s);
      if (n.kind != NodeKind::FunctionDecl) continue;
      RVal f;
      f.k = K::Fn;
      f.fn = s;
      decls_[n.text] = s;
      globals_[n.text] = f;
    }
  }

  // ---- the counting contract (mirrors lowering's static tags) ----

  enum class SClass : uint8_t { Int, Flt, Null, Const, Str, Arr, Closure, Obj, Unknown };

  SClass static_class(NodeId id) const {
    const AstNode& n = ast_.at(id);
    switch (n.kind) {
      case NodeKind::IntLit: return SClass::Int;
      case NodeKind::FloatLit: return SClass::Flt;
      case NodeKind::StrLit: return SClass::Str;
      case NodeKind::BoolLit: return SClass::Const;
      case NodeKind::NullLit: return SClass::Null;
      case NodeKind::ObjectLit:
      case NodeKind::New: return SClass::Obj;
      case NodeKind::ArrayLit: return SClass::Arr;
      case NodeKind::FunctionExpr: return SClass::Closure;
      case NodeKind::BinOp:
        switch (n.bin) {
          case BinKind::Mod: return SClass::Int;
          case BinKind::Eq:
          case BinKind::Ne:
          case BinKind::Lt:
          case BinKind::Le:
          case BinKind::Gt:
          case BinKind::Ge:
          case BinKind::And:
          case BinKind::Or: return SClass::Const;
          default: return SClass::Unknown;  // arith merges int32|float64
        }
      case NodeKind::UnOp:
        return n.un == UnKind::Not ? SClass::Const : SClass::Unknown;
      default:
        return SClass::Unknown;
    }
  }

  static SClass runtime_class(const RVal& v) {
    switch (v.k) {
      case K::Int: return SClass::Int;
      case K::Flt: return SClass::Flt;
      case K::Null: return SClass::Null;
      case K::Bool:
      case K::Undef: return SClass::Const;
      case K::Str: return SClass::Str;
      case K::Arr: return SClass::Arr;
      case K::Obj: return SClass::Obj;
      case K::Fn: return SClass::Closure;
    }
    return SClass::Unknown;
  }

  // Probes `have` against the classes in order, counting one implicit test
  // per probe executed; returns true when one matched.
  bool probe(SClass have, std::initializer_list<SClass> classes) {
    for (SClass c : classes) {
      ++tests_;
      if (have == c) return true;
    }
    return false;
  }

  // Full classification as the == cascade does it: probes until the class
  // is found; `object` is the fall-through and costs no extra probe.
  void classify_full(SClass have) {
    static const SClass order[] = {SClass::Int, SClass::Flt,  SClass::Null,
                                   SClass::Const, SClass::Str, SClass::Arr,
                                   SClass::Closure};
    for (SClass c : order) {
      ++tests_;
      if (have == c) return;
    }
    // object: no remaining probe
  }

  // ---- evaluation ----

  [[noreturn]] void halt(const std::string& msg) { throw Halt{msg}; }

  void budget() {
    if (++steps_ > 200000000ull) halt("instruction budget exceeded");
  }

  void exec_block(NodeId id, Scope& sc) {
    for (NodeId s : ast_.at(id).children) exec_stmt(s, sc);
  }

  void exec_stmt(NodeId id, Scope& sc) {
    budget();
    const AstNode& n = ast_.at(id);
    switch (n.kind) {
      case NodeKind::FunctionDecl:
        return;  // hoisted
      case NodeKind::VarDecl: {
        RVal v = n.children.empty() ? RVal::undef() : eval(n.children[0], sc);
        store_var(n.text, v, sc);
        return;
      }
      case NodeKind::ExprStmt: {
        const AstNode& e = ast_.at(n.children[0]);
        if (e.kind == NodeKind::VarDecl) {
          RVal v = eval(e.children[0], sc);
          store_var(e.text, v, sc);
        } else if (e.kind == NodeKind::PropWrite || e.kind == NodeKind::IndexWrite) {
          eval(n.children[0], sc);
        } else {
          eval(n.children[0], sc);
        }
        return;
      }
      case NodeKind::If: {
        if (truthy(eval(n.children[0], sc))) exec_stmt(n.children[1], sc);
        else if (n.children.size() > 2) exec_stmt(n.children[2], sc);
        return;
      }
      case NodeKind::While: {
        while (true) {
          budget();
          if (!truthy(eval(n.children[0], sc))) break;
          exec_stmt(n.children[1], sc);
        }
        return;
      }
      case NodeKind::Return: {
        if (sc.isTop) halt("return outside a function");
        RVal v = n.children.empty() ? RVal::undef() : eval(n.children[0], sc);
        throw ReturnSignal{std::move(v)};
      }
      case NodeKind::Throw: {
        RVal v = eval(n.children[0], sc);
        halt("uncaught throw: " + format(v));
      }
      case NodeKind::Block:
        exec_block(id, sc);
        return;
      default:
        eval(id, sc);
        return;
    }
  }

  void store_var(const std::string& name, const RVal& v, Scope& sc) {
    if (!sc.isTop) {
      auto it = sc.locals.find(name);
      if (it != sc.locals.end()) {
        it->second = v;
        return;
      }
    }
    globals_[name] = v;
  }

  bool truthy(const RVal& v) {
    if (v.k == K::Bool) return v.b;
    halt("expected a boolean condition");
  }

  RVal eval(NodeId id, Scope& sc) {
    budget();
    const AstNode& n = ast_.at(id);
    switch (n.kind) {
      case NodeKind::IntLit: return RVal::integer(n.ival);
      case NodeKind::FloatLit: return RVal::flt(n.fval);
      case NodeKind::StrLit: return RVal::str(n.text);
      case NodeKind::BoolLit: return RVal::boolean(n.ival != 0);
      case NodeKind::NullLit: return RVal::null();
      case NodeKind::This:
        if (sc.isTop) halt("'this' outside a function");
        return sc.thisVal;
      case NodeKind::Ident: {
        if (!sc.isTop) {
          auto it = sc.locals.find(n.text);
          if (it != sc.locals.end()) return it->second;
        }
        auto g = globals_.find(n.text);
        if (g == globals_.end()) halt("undefined global '" + n.text + "'");
        return g->second;
      }
      case NodeKind::FunctionExpr: {
        RVal f;
        f.k = K::Fn;
        f.fn = id;
        return f;
      }
      case NodeKind::VarDecl: {  // statement-level store in expression slot
        RVal v = eval(n.children[0], sc);
        store_var(n.text, v, sc);
        return v;
      }
      case NodeKind::BinOp:
        return eval_binop(n, sc);
      case NodeKind::UnOp:
        return eval_unop(n, sc);
      case NodeKind::PropRead: {
        RVal base = eval(n.children[0], sc);
        return prop_read(base, static_class(n.children[0]), n.text);
      }
      case NodeKind::PropWrite: {
        RVal base = eval(n.children[0], sc);
        RVal v = eval(n.children[1], sc);
        prop_write(base, static_class(n.children[0]), n.text, v);
        return v;
      }
      case NodeKind::IndexRead: {
        RVal base = eval(n.children[0], sc);
        RVal idx = eval(n.children[1], sc);
        check_array(base, static_class(n.children[0]), "indexed read on non-array");
        check_index(idx, static_class(n.children[1]));
        if (idx.i < 0 || (size_t)idx.i >= base.arr->elems.size())
          halt("array index out of bounds");
        return base.arr->elems[(size_t)idx.i];
      }
      case NodeKind::IndexWrite: {
        RVal base = eval(n.children[0], sc);
        RVal idx = eval(n.children[1], sc);
        RVal v = eval(n.children[2], sc);
        check_array(base, static_class(n.children[0]), "indexed store on non-array");
        check_index(idx, static_class(n.children[1]));
        auto& elems = base.arr->elems;
        if (idx.i < 0 || (size_t)idx.i > elems.size()) halt("array index out of bounds");
        if ((size_t)idx.i == elems.size()) elems.push_back(v);
        else elems[(size_t)idx.i] = v;
        return v;
      }
      case NodeKind::ArrayLit: {
        RVal a;
        a.k = K::Arr;
        a.arr = std::make_shared<RArrData>();
        for (NodeId c : n.children) a.arr->elems.push_back(eval(c, sc));
        return a;
      }
      case NodeKind::ObjectLit: {
        RVal o;
        o.k = K::Obj;
        o.obj = std::make_shared<RObjData>();
        for (size_t i = 0; i < n.children.size(); ++i) {
          RVal v = eval(n.children[i], sc);
          // statically object -> no class probe on the literal writes
          if (RVal* slot = o.obj->find(n.names[i])) *slot = v;
          else o.obj->props.push_back({n.names[i], v});
        }
        return o;
      }
      case NodeKind::Call: {
        RVal callee = eval(n.children[0], sc);
        std::vector<RVal> args;
        for (size_t i = 1; i < n.children.size(); ++i)
          args.push_back(eval(n.children[i], sc));
        return call(callee, RVal::undef(), args);
      }
      case NodeKind::MethodCall: {
        RVal base = eval(n.children[0], sc);
        RVal m = prop_read(base, static_class(n.children[0]), n.text);
        std::vector<RVal> args;
        for (size_t i = 1; i < n.children.size(); ++i)
          args.push_back(eval(n.children[i], sc));
        return call(m, base, args);
      }
      case NodeKind::New: {
        RVal callee = eval(n.children[0], sc);
        std::vector<RVal> args;
        for (size_t i = 1; i < n.children.size(); ++i)
          args.push_back(eval(n.children[i], sc));
        RVal o;
        o.k = K::Obj;
        o.obj = std::make_shared<RObjData>();
        call(callee, o, args);
        return o;
      }
      default:
        halt("unexpected node in expression position");
    }
  }

  // ---- operators; probe counts mirror the lowered cascades ----

  static bool is_numeric(SClass c) { return c == SClass::Int || c == SClass::Flt; }

  double as_f(const RVal& v) { return v.k == K::Int ? (double)v.i : v.f; }

  RVal eval_binop(const AstNode& n, Scope& sc) {
    BinKind k = n.bin;
    if (k == BinKind::And || k == BinKind::Or) {
      RVal l = eval(n.children[0], sc);
      bool lt = truthy(l);
      if (k == BinKind::And && !lt) return RVal::boolean(false);
      if (k == BinKind::Or && lt) return RVal::boolean(true);
      RVal r = eval(n.children[1], sc);
      return RVal::boolean(truthy(r));
    }

    RVal l = eval(n.children[0], sc);
    RVal r = eval(n.children[1], sc);
    SClass ls = static_class(n.children[0]);
    SClass rs = static_class(n.children[1]);
    SClass lc = runtime_class(l);
    SClass rc = runtime_class(r);

    switch (k) {
      case BinKind::Add:
      case BinKind::Sub:
      case BinKind::Mul:
      case BinKind::Div:
      case BinKind::Mod:
        return arith(k, l, r, ls, rs, lc, rc);
      case BinKind::Eq:
      case BinKind::Ne:
        return equality(k == BinKind::Ne, l, r, ls, rs, lc, rc);
      default:
        return relational(k, l, r, ls, rs, lc, rc);
    }
  }

  RVal arith(BinKind k, const RVal& l, const RVal& r, SClass ls, SClass rs,
             SClass lc, SClass rc) {
    const char* opn = k == BinKind::Add ? "+"
                      : k == BinKind::Sub ? "-"
                      : k == BinKind::Mul ? "*"
                      : k == BinKind::Div ? "/"
                                          : "%";
    std::string err = std::string("unsupported operand types for '") + opn + "'";
    if (k == BinKind::Mod) {
      if (ls == SClass::Unknown && !probe(lc, {SClass::Int})) halt(err);
      if (ls != SClass::Unknown && lc != SClass::Int) halt(err);
      if (rs == SClass::Unknown && !probe(rc, {SClass::Int})) halt(err);
      if (rs != SClass::Unknown && rc != SClass::Int) halt(err);
      int32_t out;
      if (!mod_i32(l.i, r.i, &out)) halt("modulo by zero");
      return RVal::integer(out);
    }
    bool allowStr = k == BinKind::Add;
    // left classification
    if (ls == SClass::Unknown) {
      bool ok = allowStr ? probe(lc, {SClass::Int, SClass::Flt, SClass::Str})
                         : probe(lc, {SClass::Int, SClass::Flt});
      if (!ok) halt(err);
    } else if (!(is_numeric(lc) || (allowStr && lc == SClass::Str))) {
      halt(err);
    }
    if (lc == SClass::Str) {
      if (rs == SClass::Unknown && !probe(rc, {SClass::Str})) halt(err);
      if (rs != SClass::Unknown && rc != SClass::Str) halt(err);
      return RVal::str(l.s + r.s);
    }
    // numeric arms
    if (rs == SClass::Unknown) {
      if (!probe(rc, {SClass::Int, SClass::Flt})) halt(err);
    } else if (!is_numeric(rc)) {
      halt(err);
    }
    if (lc == SClass::Int && rc == SClass::Int) {
      int32_t out;
      bool ok = false;
      switch (k) {
        case BinKind::Add: ok = add_i32(l.i, r.i, &out); break;
        case BinKind::Sub: ok = sub_i32(l.i, r.i, &out); break;
        case BinKind::Mul: ok = mul_i32(l.i, r.i, &out); break;
        case BinKind::Div: ok = div_i32(l.i, r.i, &out); break;
        default: break;
      }
      if (ok) return RVal::integer(out);
      double a = (double)l.i, b = (double)r.i;
      switch (k) {
        case BinKind::Add: return RVal::flt(a + b);
        case BinKind::Sub: return RVal::flt(a - b);
        case BinKind::Mul: return RVal::flt(a * b);
        case BinKind::Div: return RVal::flt(a / b);
        default: break;
      }
    }
    double a = as_f(l), b = as_f(r);
    switch (k) {
      case BinKind::Add: return RVal::flt(a + b);
      case BinKind::Sub: return RVal::flt(a - b);
      case BinKind::Mul: return RVal::flt(a * b);
      case BinKind::Div: return RVal::flt(a / b);
      default: break;
    }
    halt(err);
  }

  RVal equality(bool neg, const RVal& l, const RVal& r, SClass ls, SClass rs,
                SClass lc, SClass rc) {
    // one side statically null: a single null probe on the other
    if (ls == SClass::Null || rs == SClass::Null) {
      SClass otherStatic = ls == SClass::Null ? rs : ls;
      SClass otherRt = ls == SClass::Null ? rc : lc;
      bool eq;
      if (otherStatic != SClass::Unknown) {
        eq = otherRt == SClass::Null;
      } else {
        eq = probe(otherRt, {SClass::Null});
      }
      return RVal::boolean(neg ? !eq : eq);
    }
    SClass cls = lc;
    if (ls == SClass::Unknown) classify_full(lc);
    // right side against the left's class
    bool sameClass;
    bool mixedNumeric = false;
    if (rs != SClass::Unknown) {
      sameClass = rc == cls;
      mixedNumeric = !sameClass && is_numeric(cls) && is_numeric(rc);
    } else if (is_numeric(cls)) {
      SClass other = cls == SClass::Int ? SClass::Flt : SClass::Int;
      if (probe(rc, {cls})) {
        sameClass = true;
      } else if (probe(rc, {other})) {
        sameClass = false;
        mixedNumeric = true;
      } else {
        sameClass = false;
      }
    } else {
      sameClass = probe(rc, {cls});
    }
    bool eq = false;
    if (mixedNumeric) {
      eq = as_f(l) == as_f(r);
    } else if (sameClass) {
      switch (cls) {
        case SClass::Int: eq = l.i == r.i; break;
        case SClass::Flt: eq = l.f == r.f; break;
        case SClass::Null: eq = true; break;
        case SClass::Str: eq = l.s == r.s; break;
        case SClass::Const:
          eq = (l.k == r.k) && (l.k != K::Bool || l.b == r.b);
          break;
        case SClass::Arr: eq = l.arr == r.arr; break;
        case SClass::Obj: eq = l.obj == r.obj; break;
        case SClass::Closure: eq = l.fn == r.fn && l.s == r.s; break;
        default: eq = false;
      }
    }
    return RVal::boolean(neg ? !eq : eq);
  }

  RVal relational(BinKind k, const RVal& l, const RVal& r, SClass ls, SClass rs,
                  SClass lc, SClass rc) {
    std::string err = "relational comparison on non-numeric value";
    if (ls == SClass::Unknown) {
      if (!probe(lc, {SClass::Int, SClass::Flt})) halt(err);
    } else if (!is_numeric(lc)) {
      halt(err);
    }
    if (rs == SClass::Unknown) {
      if (!probe(rc, {SClass::Int, SClass::Flt})) halt(err);
    } else if (!is_numeric(rc)) {
      halt(err);
    }
    bool res;
    if (lc == SClass::Int && rc == SClass::Int) {
      CmpKind ck = k == BinKind::Lt ? CmpKind::Lt
                   : k == BinKind::Le ? CmpKind::Le
                   : k == BinKind::Gt ? CmpKind::Gt
                                      : CmpKind::Ge;
      res = cmp_i32(ck, l.i, r.i);
    } else {
      double a = as_f(l), b = as_f(r);
      res = k == BinKind::Lt ? a < b : k == BinKind::Le ? a <= b : k == BinKind::Gt ? a > b : a >= b;
    }
    return RVal::boolean(res);
  }

  RVal eval_unop(const AstNode& n, Scope& sc) {
    RVal v = eval(n.children[0], sc);
    if (n.un == UnKind::Not) return RVal::boolean(!truthy(v));
    SClass vs = static_class(n.children[0]);
    SClass vc = runtime_class(v);
    if (vs == SClass::Unknown) {
      if (!probe(vc, {SClass::Int, SClass::Flt})) halt("unary '-' on non-numeric value");
    } else if (!is_numeric(vc)) {
      halt("unary '-' on non-numeric value");
    }
    if (vc == SClass::Int) {
      int32_t out;
      if (sub_i32(0, v.i, &out)) return RVal::integer(out);
      return RVal::flt(-(double)v.i);
    }
    return RVal::flt(-v.f);
  }

  // ---- property access ----

  RVal prop_read(RVal& base, SClass baseStatic, const std::string& name) {
    SClass bc = runtime_class(base);
    if (name == "length") {
      if (baseStatic == SClass::Unknown) {
        if (!probe(bc, {SClass::Obj, SClass::Arr})) halt("property access on non-object");
      } else if (bc != SClass::Obj && bc != SClass::Arr) {
        halt("property access on non-object");
      }
      if (bc == SClass::Arr) return RVal::integer((int32_t)base.arr->elems.size());
    } else {
      if (baseStatic == SClass::Unknown) {
        if (!probe(bc, {SClass::Obj})) halt("property access on non-object");
      } else if (bc != SClass::Obj) {
        halt("property access on non-object");
      }
    }
    RVal* v = base.obj->find(name);
    if (!v) halt("missing property '" + name + "'");
    return *v;
  }

  void prop_write(RVal& base, SClass baseStatic, const std::string& name,
                  const RVal& v) {
    SClass bc = runtime_class(base);
    if (baseStatic == SClass::Unknown) {
      if (!probe(bc, {SClass::Obj})) halt("property store on non-object");
    } else if (bc != SClass::Obj) {
      halt("property store on non-object");
    }
    if (RVal* slot = base.obj->find(name)) *slot = v;
    else base.obj->props.push_back({name, v});
  }

  void check_array(const RVal& v, SClass st, const std::string& err) {
    SClass c = runtime_class(v);
    if (st == SClass::Unknown) {
      if (!probe(c, {SClass::Arr})) halt(err);
    } else if (c != SClass::Arr) {
      halt(err);
    }
  }

  void check_index(const RVal& v, SClass st) {
    SClass c = runtime_class(v);
    if (st == SClass::Unknown) {
      if (!probe(c, {SClass::Int})) halt("array index is not an int32");
    } else if (c != SClass::Int) {
      halt("array index is not an int32");
    }
  }

  // ---- calls ----

  RVal call(const RVal& callee, RVal thisVal, std::vector<RVal>& args) {
    if (callee.k != K::Fn) halt("value is not callable: " + format(callee));
    if (callee.fn == kNoNode) {  // builtin
      if (callee.s == "print") {
        out_ += format(args.empty() ? RVal::undef() : args[0]);
        out_ += '\n';
        return RVal::undef();
      }
      auto now = std::chrono::steady_clock::now().time_since_epoch();
      double ms =
          (double)std::chrono::duration_cast<std::chrono::microseconds>(now).count() /
          1000.0;
      return RVal::flt(ms);
    }
    if (++depth_ >= 1000) {
      --depth_;
      halt("stack overflow");
    }
    const AstNode& fn = ast_.at(callee.fn);
    Scope sc;
    sc.thisVal = std::move(thisVal);
    for (int i = 0; i < fn.ival; ++i) {
      const std::string& p = ast_.at(fn.children[i]).text;
      sc.locals[p] = (size_t)i < args.size() ? args[i] : RVal::undef();
    }
    RVal result = RVal::undef();
    try {
      exec_block(fn.children.back(), sc);
    } catch (ReturnSignal& r) {
      result = std::move(r.v);
    }
    --depth_;
    return result;
  }

 public:
  std::string format(const RVal& v) {
    switch (v.k) {
      case K::Int: return std::to_string(v.i);
      case K::Flt: return number_text(v.f);
      case K::Null: return "null";
      case K::Bool: return v.b ? "true" : "false";
      case K::Undef: return "undefined";
      case K::Str: return v.s;
      case K::Arr: return "[array]";
      case K::Obj: return "[object]";
      case K::Fn: {
        if (v.fn == kNoNode) return "[function " + v.s + "]";
        const AstNode& f = ast_.at(v.fn);
        return "[function " + f.text + "]";
      }
    }
    return "?";
  }
};

}  // namespace bbvm
