#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "bbvm/fuzz.hpp"
#include "helpers.hpp"

using namespace bbvm;
using namespace bbvm::test;

namespace {

std::vector<std::string> corpus_files() {
  namespace fs = std::filesystem;
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(BBVM_CORPUS_DIR))
    if (entry.path().extension() == ".js") out.push_back(entry.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

const std::vector<ExecMode> kLadder = {ExecMode::Baseline, ExecMode::Intra,
                                       ExecMode::Shapes, ExecMode::Entry,
                                       ExecMode::EntryCont};

}  // namespace

TEST_CASE("recursive sum: two tag tests remain per activation under intra versioning") {
  for (int n : {10, 50}) {
    auto r = run_text(rec_sum_driver(n), ExecMode::Intra);
    REQUIRE(r.exec.status == RunStatus::Ok);
    CHECK(r.exec.output == std::to_string(n * (n + 1) / 2) + "\n");
    CHECK(r.stats.dynTagTests == 2 * (uint64_t)n + 1);
  }
}

TEST_CASE("recursive sum: interprocedural specialization leaves O(1) tag tests") {
  uint64_t count10 = run_text(rec_sum_driver(10), ExecMode::EntryCont).stats.dynTagTests;
  uint64_t count1000 =
      run_text(rec_sum_driver(1000), ExecMode::EntryCont).stats.dynTagTests;
  CHECK(count10 == count1000);  // independent of N
  CHECK(count10 <= 4);
}

TEST_CASE("version cache: identical contexts share one version") {
  // the loop body block is entered many times under the same context; the
  // engine must compile it once
  auto r = run_text(
      "var i = 0;\n"
      "var s = 0;\n"
      "while (i < 100) { s = s + i; i = i + 1; }\n"
      "print(s);\n",
      ExecMode::Intra);
  CHECK(r.exec.output == "4950\n");
  CHECK(r.stats.versionsCompiled < 50);  // far fewer compiles than iterations
}

TEST_CASE("version cap: the megamorphic join keeps five versions plus a generic") {
  ProgramIR prog = compile_source(corpus_source("megamorphic.js"));
  Features feat = Features::for_mode(ExecMode::EntryCont, {}, false, true);
  Engine eng(prog, feat);
  ExecResult res = eng.run();
  REQUIRE(res.status == RunStatus::Ok);

  FuncId pick = fn_by_name(prog, "pick");
  REQUIRE(pick != kNoFunc);
  uint32_t maxSeen = 0;
  bool cappedBlockWithGeneric = false;
  for (BlockId b = 0; b < (BlockId)prog.functions[pick].blocks.size(); ++b) {
    auto c = eng.block_version_count(pick, b);
    maxSeen = std::max(maxSeen, c.nonGeneric);
    CHECK(c.nonGeneric <= feat.maxVers);
    if (c.nonGeneric == feat.maxVers && c.hasGeneric) cappedBlockWithGeneric = true;
  }
  CHECK(maxSeen == feat.maxVers);
  CHECK(cappedBlockWithGeneric);
}

TEST_CASE("version cap: lowering the cap still computes the right answer") {
  Limits lims;
  lims.maxVers = 1;
  lims.maxEntries = 1;
  for (const std::string& path : corpus_files()) {
    INFO(path);
    ProgramIR prog = compile_source(load_source(path));
    Ast ast = Parser(tokenize(load_source(path))).run();
    auto ref = RefInterp(ast).run();
    Engine eng(prog, Features::for_mode(ExecMode::EntryCont, lims, false, true), lims);
    ExecResult res = eng.run();
    CHECK((res.status == RunStatus::Ok) == !ref.halted);
    CHECK(res.output == ref.output);
  }
}

TEST_CASE("tree-sum: two entry points, object entry free of tag tests") {
  ProgramIR prog = compile_source(corpus_source("tree-sum.js"));
  Engine eng(prog, Features::for_mode(ExecMode::EntryCont, {}, false, true));
  REQUIRE(eng.run().status == RunStatus::Ok);

  FuncId sum = fn_by_name(prog, "sum");
  REQUIRE(sum != kNoFunc);
  CHECK(eng.specialized_entry_count(sum) == 2);
  auto entries = eng.entry_summaries(sum);
  bool sawNull = false, sawObject = false;
  for (const auto& e : entries) {
    if (e.isGeneric) continue;
    if (e.argTags.find("null") != std::string::npos) {
      sawNull = true;
      CHECK(e.tagTests == 0);
    }
    if (e.argTags.find("object") != std::string::npos) {
      sawObject = true;
      CHECK(e.tagTests == 0);
      CHECK(e.shapeTests == 2);  // S2 probed first, then S1
    }
  }
  CHECK(sawNull);
  CHECK(sawObject);

  // the dump surfaces the same facts
  std::string dump = eng.dump_versions();
  CHECK(dump.find("entry [specialized]") != std::string::npos);
  CHECK(dump.find("tag_tests=0 shape_tests=2") != std::string::npos);
}

TEST_CASE("tree-sum: exactly two node shapes arise, leaf and internal") {
  ProgramIR prog = compile_source(corpus_source("tree-sum.js"));
  Engine eng(prog, Features::for_mode(ExecMode::EntryCont, {}, false, false));
  REQUIRE(eng.run().status == RunStatus::Ok);
  const ShapeTable& shapes = eng.shape_table();
  // count full node shapes: val/left/right split by child tags
  int leaf = 0, internal = 0, other = 0;
  for (ShapeId id = 1; id < (ShapeId)shapes.size(); ++id) {
    if (shapes.at(id).propCount != 3) continue;
    auto left = shapes.lookup(id, "left");
    auto right = shapes.lookup(id, "right");
    auto val = shapes.lookup(id, "val");
    if (!left || !right || !val) continue;
    if (left->tag == TypeTag::null() && right->tag == TypeTag::null()) ++leaf;
    else if (left->tag == TypeTag::object() && right->tag == TypeTag::object())
      ++internal;
    else ++other;
  }
  CHECK(leaf == 1);
  CHECK(internal == 1);
  CHECK(other == 0);
}

TEST_CASE("mode ladder: tag tests never increase with more specialization") {
  for (const std::string& path : corpus_files()) {
    INFO(path);
    ProgramIR prog = compile_source(load_source(path));
    uint64_t prev = UINT64_MAX;
    for (ExecMode m : kLadder) {
      Engine eng(prog, Features::for_mode(m, {}, false, false));
      ExecResult res = eng.run();
      REQUIRE(res.status == RunStatus::Ok);
      CHECK(eng.stats().dynTagTests <= prev);
      prev = eng.stats().dynTagTests;
    }
  }
}

TEST_CASE("overflow checks are mode-independent") {
  for (const std::string& path : corpus_files()) {
    INFO(path);
    ProgramIR prog = compile_source(load_source(path));
    uint64_t expected = UINT64_MAX;
    for (ExecMode m : kLadder) {
      Engine eng(prog, Features::for_mode(m, {}, false, false));
      REQUIRE(eng.run().status == RunStatus::Ok);
      if (expected == UINT64_MAX) expected = eng.stats().overflowChecks;
      else CHECK(eng.stats().overflowChecks == expected);
    }
  }
}

TEST_CASE("return-type memorization: mixed returns invalidate continuations") {
  ProgramIR prog = compile_source(corpus_source("mixed-return.js"));
  Engine eng(prog, Features::for_mode(ExecMode::EntryCont, {}, false, true));
  ExecResult res = eng.run();
  REQUIRE(res.status == RunStatus::Ok);  // validation on: no stale continuation ran
  CHECK(res.output == "done\n");
  CHECK(eng.stats().continuationsInvalidated >= 1);
  CHECK(eng.stats().invalidatingFunctions.size() == 1);
  CHECK(eng.stats().contUnseenCalleeState == 0);
}

TEST_CASE("invalidation with zero dependents is a no-op") {
  // the function's first compiled return is already unknown-typed: its
  // state goes to unknown with nobody registered
  auto r = run_text(
      "function pass(x) { return x; }\n"
      "var i = 0;\n"
      "while (i < 5) { print(pass(i)); i = i + 1; }\n",
      ExecMode::EntryCont);
  REQUIRE(r.exec.status == RunStatus::Ok);
  CHECK(r.stats.continuationsInvalidated == 0);
}

TEST_CASE("invalidated stubs recompile once and never flap") {
  // int returns, then strings, then ints again: exactly one invalidation
  auto r = run_text(
      "function flip(i) { if (i % 2 == 0) return 1; return \"s\"; }\n"
      "var i = 0;\n"
      "while (i < 20) { print(flip(i)); i = i + 1; }\n",
      ExecMode::EntryCont);
  REQUIRE(r.exec.status == RunStatus::Ok);
  CHECK(r.stats.invalidatingFunctions.size() == 1);
  // dependents are cleared on invalidation and never re-registered under
  // an unknown state, so each site invalidates at most once
  CHECK(r.stats.continuationsInvalidated <= 2);
}

TEST_CASE("method identity makes callees known under typed shapes") {
  SourceProgram src = corpus_source("accum.js");
  ProgramIR prog = compile_source(src);
  Engine shapes(prog, Features::for_mode(ExecMode::Shapes, {}, false, true));
  REQUIRE(shapes.run().status == RunStatus::Ok);
  CHECK(shapes.stats().knownCalleeCalls == shapes.stats().totalCalls);

  Engine intra(prog, Features::for_mode(ExecMode::Intra, {}, false, true));
  REQUIRE(intra.run().status == RunStatus::Ok);
  CHECK(intra.stats().knownCalleeCalls == 0);
}

TEST_CASE("calls through closure-unknown values use the generic entry") {
  // after `h == a`, h is known to be *a* closure but not which one; both
  // calls must route through the generic entry and still compute correctly
  std::string text =
      "function a() { return 1; }\n"
      "function b() { return 2; }\n"
      "function run(h) { if (h == a) { return h(); } return h(); }\n"
      "print(run(a) + run(b));\n";
  // without entry specialization the parameter's identity is lost and the
  // == probe only narrows h to closure-unknown
  auto r = run_text(text, ExecMode::Shapes);
  REQUIRE(r.exec.status == RunStatus::Ok);
  CHECK(r.exec.output == "3\n");
  CHECK(r.stats.knownCalleeCalls < r.stats.totalCalls);

  // with entry points the identity flows into run() and the inner calls
  // become direct; either way the program behaves identically
  auto e = run_text(text, ExecMode::EntryCont);
  REQUIRE(e.exec.status == RunStatus::Ok);
  CHECK(e.exec.output == "3\n");
  CHECK(e.stats.knownCalleeCalls == e.stats.totalCalls);
}

TEST_CASE("laziness: untaken branches stay stubs") {
  auto out = [](const std::string& text) {
    ProgramIR prog = compile_text(text);
    Engine eng(prog, Features::for_mode(ExecMode::Intra, {}, false, false));
    ExecResult res = eng.run();
    REQUIRE(res.status == RunStatus::Ok);
    return std::pair<uint64_t, uint64_t>(eng.stats().stubEvents,
                                         eng.stats().versionsCompiled);
  };
  auto [stubs, compiled] = out(
      "var i = 0;\n"
      "if (i == 1) { print(\"dead\"); }\n"
      "print(\"alive\");\n");
  CHECK(compiled < stubs);  // the dead arm was requested but never compiled
}

TEST_CASE("entry-point keys widen shapes by default, keep them with the flag") {
  SourceProgram src = corpus_source("accum.js");
  ProgramIR prog = compile_source(src);
  for (bool keepShapes : {false, true}) {
    Engine eng(prog, Features::for_mode(ExecMode::EntryCont, {}, keepShapes, true));
    ExecResult res = eng.run();
    REQUIRE(res.status == RunStatus::Ok);
    CHECK(res.output == "5\n3\n");
    bool anyShapeInKey = false;
    for (const std::string& line : eng.stats().entryPointsDetail)
      if (line.find("@S") != std::string::npos) anyShapeInKey = true;
    CHECK(anyShapeInKey == keepShapes);
  }
}

TEST_CASE("validation mode passes across the corpus and all modes") {
  for (const std::string& path : corpus_files()) {
    INFO(path);
    ProgramIR prog = compile_source(load_source(path));
    for (ExecMode m : kLadder) {
      Engine eng(prog, Features::for_mode(m, {}, false, /*validate=*/true));
      ExecResult res = eng.run();
      CHECK(res.status == RunStatus::Ok);
      // baseline contexts are empty and carry nothing to check
      if (m == ExecMode::EntryCont) CHECK(eng.stats().validatedEntries > 0);
    }
  }
}

TEST_CASE("shape dump reproduces the accumulator transition chain") {
  ProgramIR prog = compile_source(corpus_source("accum.js"));
  Engine eng(prog, Features::for_mode(ExecMode::Shapes, {}, false, false));
  REQUIRE(eng.run().status == RunStatus::Ok);
  std::string dump = eng.dump_shapes();
  // root -> n:int32 -> add:closure/idX -> sub:closure/idY, one path
  size_t n = dump.find("n: int32 @slot0");
  REQUIRE(n != std::string::npos);
  size_t add = dump.find("add: closure/id", n);
  REQUIRE(add != std::string::npos);
  size_t sub = dump.find("sub: closure/id", add);
  REQUIRE(sub != std::string::npos);
  CHECK(dump.find("@slot1", n) != std::string::npos);
  CHECK(dump.find("@slot2", add) != std::string::npos);
  // the two method identities differ
  CHECK(dump.substr(add, 20) != dump.substr(sub, 20));
  CHECK(eng.dump_shapes() == dump);  // deterministic
}

TEST_CASE("shape dump reproduces the leaf/internal node split") {
  ProgramIR prog = compile_source(corpus_source("tree-sum.js"));
  Engine eng(prog, Features::for_mode(ExecMode::EntryCont, {}, false, false));
  REQUIRE(eng.run().status == RunStatus::Ok);
  std::string dump = eng.dump_shapes();
  CHECK(dump.find("val: int32 @slot0") != std::string::npos);
  CHECK(dump.find("left: null @slot1") != std::string::npos);
  CHECK(dump.find("left: object @slot1") != std::string::npos);
  CHECK(dump.find("right: null @slot2") != std::string::npos);
  CHECK(dump.find("right: object @slot2") != std::string::npos);
}

TEST_CASE("laziness: compiled units never exceed entered units") {
  for (const std::string& path : corpus_files()) {
    INFO(path);
    ProgramIR prog = compile_source(load_source(path));
    for (ExecMode m : kLadder) {
      Engine eng(prog, Features::for_mode(m, {}, false, false));
      REQUIRE(eng.run().status == RunStatus::Ok);
      CHECK(eng.stats().versionsCompiled <= eng.stats().versionEnters);
    }
  }
}

TEST_CASE("entry point details serialize tag names") {
  ProgramIR prog = compile_source(corpus_source("tree-sum.js"));
  Engine eng(prog, Features::for_mode(ExecMode::EntryCont, {}, false, false));
  REQUIRE(eng.run().status == RunStatus::Ok);
  bool sawObjectEntry = false, sawNullEntry = false;
  for (const std::string& line : eng.stats().entryPointsDetail) {
    if (line.find("sum") == 0 && line.find("object") != std::string::npos)
      sawObjectEntry = true;
    if (line.find("sum") == 0 && line.find("null") != std::string::npos)
      sawNullEntry = true;
  }
  CHECK(sawObjectEntry);
  CHECK(sawNullEntry);
}

TEST_CASE("quick differential fuzz (seeded)") {
  for (uint64_t seed = 1000; seed < 1040; ++seed) {
    std::string text = generate_fuzz_program(seed);
    INFO("seed " << seed);
    SourceProgram src = source_from_string(text);
    Ast ast = Parser(tokenize(src)).run();
    ProgramIR prog = Lowerer(ast).run();
    auto ref = RefInterp(ast).run();
    REQUIRE_FALSE(ref.halted);
    for (ExecMode m : kLadder) {
      Engine eng(prog, Features::for_mode(m, {}, false, true));
      ExecResult res = eng.run();
      CHECK(res.status == RunStatus::Ok);
      CHECK(res.output == ref.output);
      if (m == ExecMode::Baseline)
        CHECK(eng.stats().dynTagTests == ref.implicitTests);
    }
  }
}

TEST_CASE("instruction budget aborts runaway programs") {
  Limits lims;
  lims.maxInstrs = 10000;
  auto r = run_text("var i = 0; while (i < 100000000) { i = i + 1; }", ExecMode::Intra,
                    false, lims);
  CHECK(r.exec.status == RunStatus::Halted);
  CHECK(r.exec.message.find("budget") != std::string::npos);
}
