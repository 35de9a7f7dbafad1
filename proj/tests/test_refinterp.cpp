#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "helpers.hpp"

using namespace bbvm;
using namespace bbvm::test;

namespace {

RefInterp::Result ref_run(const std::string& text) {
  Ast ast = parse_text(text);
  return RefInterp(ast).run();
}

}  // namespace

TEST_CASE("refinterp: recursive sum arithmetic series") {
  auto r = ref_run(rec_sum_driver(100));
  CHECK_FALSE(r.halted);
  CHECK(r.output == "5050\n");
}

TEST_CASE("refinterp: tree-sum computes 502 and does not throw") {
  SourceProgram src = corpus_source("tree-sum.js");
  Ast ast = Parser(tokenize(src)).run();
  auto r = RefInterp(ast).run();
  CHECK_FALSE(r.halted);
  auto explicitSum = ref_run(
      "function sum(t) { if (t == null) return 0; return sum(t.left) + "
      "sum(t.right) + t.val; }\n"
      "function makeTree(d) { if (d == 0) return null; return { val: d, left: "
      "makeTree(d-1), right: makeTree(d-1) }; }\n"
      "print(sum(makeTree(8)));");
  CHECK(explicitSum.output == "502\n");
}

TEST_CASE("refinterp: implicit counts follow the lowering contract") {
  // literals never probe
  CHECK(ref_run("print(1 + 2);").implicitTests == 0);
  // an ident operand probes once (int32 is the first cascade entry)
  CHECK(ref_run("var x = 1; print(x + 2);").implicitTests == 1);
  // a float ident misses int32 then hits float64
  CHECK(ref_run("var x = 1.5; print(x + 2);").implicitTests == 2);
  // both operands unknown, both int
  CHECK(ref_run("var x = 1; var y = 2; print(x + y);").implicitTests == 2);
  // null comparison is one probe when the other side is non-static
  CHECK(ref_run("var x = 1; print(x == null);").implicitTests == 1);
  // arithmetic results are merge-tagged unknown, so the outer + re-probes
  CHECK(ref_run("var a = 1; var b = 2; var c = 3; print(a + b + c);").implicitTests ==
        4);
  // % result is statically int32: no probe at the outer operator
  CHECK(ref_run("var a = 7; print(a % 3 + 1);").implicitTests == 1);
}

TEST_CASE("refinterp: recursive sum baseline count is 4 per else-activation plus 1") {
  auto r = ref_run(rec_sum_driver(100));
  // per activation taking the else branch: n at ==, n at -, n at + and the
  // call result at +; the base case pays only the == probe
  CHECK(r.implicitTests == 4 * 100 + 1);
}

TEST_CASE("refinterp: halts mirror the VM's conditions") {
  CHECK(ref_run("print(1 + \"x\");").halted);
  CHECK(ref_run("var x = 5; x();").halted);
  CHECK(ref_run("function r() { return r(); } r();").halted);
  CHECK(ref_run("print(nosuch);").halted);
  CHECK(ref_run("if (1) print(2);").halted);  // conditions must be boolean
  CHECK(ref_run("print({ a: 1 }.b);").halted);
}

TEST_CASE("refinterp vs engine: identical behavior on every corpus program") {
  namespace fs = std::filesystem;
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(BBVM_CORPUS_DIR)) {
    if (entry.path().extension() != ".js") continue;
    ++seen;
    INFO(entry.path().string());
    SourceProgram src = load_source(entry.path().string());
    Ast ast = Parser(tokenize(src)).run();
    auto ref = RefInterp(ast).run();
    ProgramIR prog = Lowerer(ast).run();
    for (ExecMode m : {ExecMode::Baseline, ExecMode::Intra, ExecMode::Shapes,
                       ExecMode::Entry, ExecMode::EntryCont}) {
      INFO(mode_name(m));
      Engine eng(prog, Features::for_mode(m, {}, false, /*validate=*/true));
      ExecResult res = eng.run();
      CHECK((res.status == RunStatus::Ok) == !ref.halted);
      CHECK(res.output == ref.output);
      if (m == ExecMode::Baseline && !ref.halted) {
        // the count-model agreement: naive dispatch == baseline lowering
        CHECK(eng.stats().dynTagTests == ref.implicitTests);
      }
    }
  }
  CHECK(seen >= 10);
}
