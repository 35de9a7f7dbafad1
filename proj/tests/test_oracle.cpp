#include <catch2/catch_amalgamated.hpp>

#include "bbvm/oracle.hpp"
#include "helpers.hpp"

using namespace bbvm;
using namespace bbvm::test;

TEST_CASE("oracle: fully monomorphic program keeps zero tag tests") {
  ProgramIR prog = compile_text(rec_sum_driver(10));
  OracleResult o = run_oracle(prog);
  REQUIRE(o.record.status == RunStatus::Ok);
  REQUIRE(o.rerun.status == RunStatus::Ok);
  CHECK(o.baselineTagTests == 41);  // 4 per else-activation + the base case
  CHECK(o.remainingTagTests == 0);
  CHECK(o.polymorphicSites == 0);
  CHECK(o.rerun.output == o.record.output);
}

TEST_CASE("oracle: the recursive sum parameter test is monomorphically true") {
  ProgramIR prog = compile_text(rec_sum_driver(10));
  Engine eng(prog, Features::for_mode(ExecMode::Baseline, {}, false, false));
  REQUIRE(eng.run().status == RunStatus::Ok);
  FuncId f = fn_by_name(prog, "f");
  // site 0 probe 0 in f is TagTest(n, int32) at ==
  SiteKey key{f, 0, 0};
  auto it = eng.stats().siteOutcomes.find(key.packed());
  REQUIRE(it != eng.stats().siteOutcomes.end());
  CHECK(it->second.sawTrue);
  CHECK_FALSE(it->second.sawFalse);
  CHECK(it->second.execCount == 11);
}

TEST_CASE("oracle: unexecuted sites stay out of the table") {
  ProgramIR prog = compile_text(
      "var i = 0;\n"
      "var x = 1;\n"
      "if (i == 1) { print(x + x); }\n"  // dead: x's probes never run
      "print(i);\n");
  Engine eng(prog, Features::for_mode(ExecMode::Baseline, {}, false, false));
  REQUIRE(eng.run().status == RunStatus::Ok);
  // only the executed i probe shows up
  CHECK(eng.stats().siteOutcomes.size() == 1);
}

TEST_CASE("oracle: tree-sum keeps the polymorphic null test, 511 executions") {
  ProgramIR prog = compile_source(corpus_source("tree-sum.js"));
  OracleResult o = run_oracle(prog);
  REQUIRE(o.rerun.status == RunStatus::Ok);
  // the only polymorphic site is TagTest(tree, null): 255 object calls and
  // 256 null calls of sum over the depth-8 complete binary tree
  CHECK(o.polymorphicSites == 1);
  CHECK(o.remainingTagTests == 511);
  CHECK(o.remainingTagTests <= o.baselineTagTests);
}

TEST_CASE("oracle: never changes program behavior across the corpus") {
  for (const char* name :
       {"f.js", "accum.js", "tree-sum.js", "mixed-return.js", "megamorphic.js",
        "fib.js", "loops.js", "strings.js", "objects.js", "arrays.js", "orbit.js"}) {
    INFO(name);
    ProgramIR prog = compile_source(corpus_source(name));
    OracleResult o = run_oracle(prog);
    CHECK(o.record.status == RunStatus::Ok);
    CHECK(o.rerun.status == RunStatus::Ok);
    CHECK(o.rerun.output == o.record.output);
    CHECK(o.remainingTagTests <= o.baselineTagTests);
  }
}

TEST_CASE("oracle: a removed probe that flips raises a determinism violation") {
  // forge a removal table that claims the probe always fails
  ProgramIR prog = compile_text("var x = 1; print(x + 2);");
  Features base = Features::for_mode(ExecMode::Baseline, {}, false, false);
  Engine rec(prog, base);
  REQUIRE(rec.run().status == RunStatus::Ok);
  REQUIRE(rec.stats().siteOutcomes.size() == 1);
  uint64_t key = rec.stats().siteOutcomes.begin()->first;
  RemovalTable forged;
  forged.emplace(key, false);  // recorded "always false"; reality is true
  Engine rerun(prog, base, {}, &forged);
  ExecResult res = rerun.run();
  CHECK(res.status == RunStatus::DeterminismViolation);
}

TEST_CASE("oracle: mode wiring via run_program") {
  ProgramIR prog = compile_source(corpus_source("f.js"));
  RunConfig cfg;
  cfg.mode = ExecMode::Oracle;
  RunOutcome out = run_program(prog, cfg);
  CHECK(out.isOracle);
  CHECK(out.exec.status == RunStatus::Ok);
  CHECK(out.oracle.remainingTagTests == 0);
  CHECK(out.oracle.baselineTagTests > 0);
}
