#pragma once

#include <random>
#include <string>
#include <vector>

namespace bbvm {

// Seeded generator of small corpus-language programs for the differential
// suite. Programs are type-correct by construction (no halting paths) and
// terminate: loops are literal-bounded and recursion carries explicit fuel.
// The grammar deliberately exercises the specializer's interesting paths:
// polymorphic arithmetic (with possible int32 overflow promotion),
// constructors with methods, same-tag property updates, arrays, string
// concatenation, and functions with mixed return types (which trigger
// continuation invalidation). Methods never re-type properties of objects
// held live across calls, matching the aliasing contract of the engine.
class FuzzGen {
 public:
  explicit FuzzGen(uint64_t seed) : rng_(seed) {}

  std::string generate() {
    src_.clear();
    numFns_ = 0;
    emit_workers();
    emit_ctor();
    emit_mixed();
    emit_main();
    return src_;
  }

 private:
  enum class Ty : uint8_t { Num, Flt, Bool, Str };

  struct Var {
    std::string name;
    Ty ty;
  };

  struct Fn {
    std::string name;
    std::vector<Ty> params;
    Ty ret;
    bool fueled = false;
  };

  std::mt19937_64 rng_;
  std::string src_;
  std::vector<Fn> fns_;
  bool hasCtor_ = false;
  bool hasMixed_ = false;
  int numFns_ = 0;

  uint64_t pick(uint64_t n) { return rng_() % n; }
  bool coin() { return pick(2) == 0; }

  static const char* ty_suffix(Ty t) {
    switch (t) {
      case Ty::Num: return "n";
      case Ty::Flt: return "f";
      case Ty::Bool: return "b";
      case Ty::Str: return "s";
    }
    return "x";
  }

  std::string lit(Ty t) {
    switch (t) {
      case Ty::Num: {
        // occasionally large enough that loop accumulation overflows int32
        if (pick(8) == 0) return std::to_string(900000000 + (int)pick(1000));
        return std::to_string((int)pick(100));
      }
      case Ty::Flt: {
        static const char* fl[] = {"0.5", "1.25", "2.5", "3.75", "0.125", "10.5"};
        return fl[pick(6)];
      }
      case Ty::Bool: return coin() ? "true" : "false";
      case Ty::Str: {
        static const char* ss[] = {"\"a\"", "\"bc\"", "\"xyz\"", "\"q\"", "\"\""};
        return ss[pick(5)];
      }
    }
    return "0";
  }

  // expression of type t over the given scope; depth-bounded
  std::string expr(Ty t, const std::vector<Var>& scope, int depth) {
    std::vector<const Var*> candidates;
    for (const Var& v : scope)
      if (v.ty == t) candidates.push_back(&v);

    if (depth <= 0 || pick(3) == 0) {
      if (!candidates.empty() && coin()) return candidates[pick(candidates.size())]->name;
      return lit(t);
    }

    switch (t) {
      case Ty::Num: {
        switch (pick(candidates.empty() ? 4 : 5)) {
          case 0:
            return "(" + expr(Ty::Num, scope, depth - 1) + " + " +
                   expr(Ty::Num, scope, depth - 1) + ")";
          case 1:
            return "(" + expr(Ty::Num, scope, depth - 1) + " - " +
                   expr(Ty::Num, scope, depth - 1) + ")";
          case 2:
            return "(" + expr(Ty::Num, scope, depth - 1) + " * " +
                   std::to_string(1 + (int)pick(4)) + ")";
          case 3:
            return call_of(Ty::Num, scope, depth);
          default:
            return candidates[pick(candidates.size())]->name;
        }
      }
      case Ty::Flt: {
        switch (pick(4)) {
          case 0:
            return "(" + expr(Ty::Flt, scope, depth - 1) + " + " +
                   expr(Ty::Num, scope, depth - 1) + ")";
          case 1:
            return "(" + expr(Ty::Flt, scope, depth - 1) + " * " +
                   expr(Ty::Flt, scope, depth - 1) + ")";
          case 2:
            return "(" + expr(Ty::Num, scope, depth - 1) + " / " +
                   std::to_string(3 + (int)pick(5)) + ")";
          default:
            return call_of(Ty::Flt, scope, depth);
        }
      }
      case Ty::Bool: {
        switch (pick(5)) {
          case 0:
            return "(" + expr(Ty::Num, scope, depth - 1) + " < " +
                   expr(Ty::Num, scope, depth - 1) + ")";
          case 1:
            return "(" + expr(Ty::Flt, scope, depth - 1) + " >= " +
                   expr(Ty::Flt, scope, depth - 1) + ")";
          case 2:
            return "(" + expr(Ty::Bool, scope, depth - 1) + " && " +
                   expr(Ty::Bool, scope, depth - 1) + ")";
          case 3:
            return "(!" + expr(Ty::Bool, scope, depth - 1) + ")";
          default:
            return "(" + expr(Ty::Str, scope, depth - 1) + " == " +
                   expr(Ty::Str, scope, depth - 1) + ")";
        }
      }
      case Ty::Str: {
        if (coin())
          return "(" + expr(Ty::Str, scope, depth - 1) + " + " +
                 expr(Ty::Str, scope, depth - 1) + ")";
        return call_of(Ty::Str, scope, depth);
      }
    }
    return lit(t);
  }

  std::string call_of(Ty t, const std::vector<Var>& scope, int depth) {
    std::vector<const Fn*> cands;
    for (const Fn& f : fns_)
      if (f.ret == t) cands.push_back(&f);
    if (cands.empty()) return lit(t);
    const Fn& f = *cands[pick(cands.size())];
    std::string c = f.name + "(";
    for (size_t i = 0; i < f.params.size(); ++i) {
      if (i) c += ", ";
      if (f.fueled && i == 0) c += std::to_string(1 + (int)pick(6));
      else c += expr(f.params[i], scope, depth - 1);
    }
    return c + ")";
  }

  void emit_workers() {
    int n = 1 + (int)pick(2);
    for (int w = 0; w < n; ++w) {
      Fn f;
      f.name = "w" + std::to_string(numFns_++);
      f.ret = (Ty)pick(4);
      int np = 1 + (int)pick(3);
      for (int i = 0; i < np; ++i) f.params.push_back((Ty)pick(4));
      std::vector<Var> scope;
      for (size_t i = 0; i < f.params.size(); ++i)
        scope.push_back({std::string(1, (char)('a' + i)) + ty_suffix(f.params[i]),
                         f.params[i]});
      src_ += "function " + f.name + "(";
      for (size_t i = 0; i < scope.size(); ++i) {
        if (i) src_ += ", ";
        src_ += scope[i].name;
      }
      src_ += ") {\n";
      // workers may only call earlier functions; register after body
      if (coin()) {
        Ty lt = (Ty)pick(4);
        Var local{"t" + std::string(ty_suffix(lt)), lt};
        src_ += "  var " + local.name + " = " + expr(lt, scope, 2) + ";\n";
        scope.push_back(local);
      }
      if (coin()) {
        src_ += "  if (" + expr(Ty::Bool, scope, 2) + ") return " +
                expr(f.ret, scope, 2) + ";\n";
      }
      src_ += "  return " + expr(f.ret, scope, 2) + ";\n";
      src_ += "}\n";
      fns_.push_back(f);
    }
    // a fueled recursive worker over ints
    if (coin()) {
      Fn f;
      f.name = "rec" + std::to_string(numFns_++);
      f.ret = Ty::Num;
      f.params = {Ty::Num, Ty::Num};
      f.fueled = true;
      src_ += "function " + f.name + "(fuel, x) {\n";
      src_ += "  if (fuel < 1) return x;\n";
      src_ += "  return " + f.name + "(fuel - 1, x + " + std::to_string(1 + (int)pick(5)) +
              ");\n";
      src_ += "}\n";
      fns_.push_back(f);
    }
  }

  void emit_ctor() {
    if (!coin()) return;
    hasCtor_ = true;
    src_ += "function Box() {\n";
    src_ += "  this.a = " + std::to_string((int)pick(50)) + ";\n";
    src_ += "  this.b = " + lit(Ty::Flt) + ";\n";
    src_ += "  this.get = function getter(d) { return this.a + d; };\n";
    src_ += "}\n";
  }

  void emit_mixed() {
    if (!coin()) return;
    hasMixed_ = true;
    src_ += "function mixed(i) {\n";
    src_ += "  if (i < " + std::to_string(2 + (int)pick(5)) + ") return i * 2;\n";
    src_ += "  return \"done\";\n";
    src_ += "}\n";
  }

  void emit_main() {
    std::vector<Var> scope;
    auto decl = [&](Ty t) {
      Var v{"g" + std::to_string(scope.size()) + ty_suffix(t), t};
      src_ += "var " + v.name + " = " + expr(t, scope, 2) + ";\n";
      scope.push_back(v);
    };
    decl(Ty::Num);
    decl(Ty::Flt);
    if (coin()) decl(Ty::Str);
    if (coin()) decl(Ty::Bool);

    bool useArr = coin();
    if (useArr)
      src_ += "var arr = [" + lit(Ty::Num) + ", " + lit(Ty::Num) + ", " +
              lit(Ty::Num) + "];\n";
    if (hasCtor_) {
      src_ += "var box = new Box();\n";
      src_ += "box.a = box.a + 1;\n";  // same-tag property update
    }

    // accumulation loop
    int iters = 2 + (int)pick(7);
    Var acc{"acc", Ty::Num};
    src_ += "var acc = 0;\n";
    src_ += "var i = 0;\n";
    src_ += "while (i < " + std::to_string(iters) + ") {\n";
    std::vector<Var> loopScope = scope;
    loopScope.push_back(acc);
    loopScope.push_back({"i", Ty::Num});
    src_ += "  acc = acc + " + expr(Ty::Num, loopScope, 2) + ";\n";
    if (useArr) {
      src_ += "  arr[i % 3] = " + expr(Ty::Num, loopScope, 1) + ";\n";
      src_ += "  acc = acc + arr[i % 3];\n";
    }
    if (hasCtor_ && coin()) src_ += "  acc = acc + box.get(i);\n";
    if (hasMixed_) src_ += "  print(mixed(i));\n";
    if (coin())
      src_ += "  if (" + expr(Ty::Bool, loopScope, 1) + ") acc = acc + 1;\n";
    src_ += "  i = i + 1;\n";
    src_ += "}\n";
    scope.push_back(acc);

    src_ += "print(acc);\n";
    for (const Var& v : scope)
      if (coin()) src_ += "print(" + v.name + ");\n";
    if (hasCtor_) src_ += "print(box.a);\nprint(box.get(7));\n";
    src_ += "print(" + expr(Ty::Str, scope, 2) + ");\n";
    src_ += "print(" + expr(Ty::Flt, scope, 2) + ");\n";
  }
};

inline std::string generate_fuzz_program(uint64_t seed) {
  return FuzzGen(seed).generate();
}

}  // namespace bbvm
