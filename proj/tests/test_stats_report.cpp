#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace bbvm;
using namespace bbvm::test;

TEST_CASE("one executed tag test bumps the counter by one") {
  auto r = run_text("var x = 1; print(x + 1);", ExecMode::Baseline);
  CHECK(r.stats.dynTagTests == 1);
}

TEST_CASE("a compile-time-eliminated test counts statically, not dynamically") {
  auto r = run_text("function g(x) { return x + x + x; }\nprint(g(1));",
                    ExecMode::Intra);
  // the first probe discovers int32; later uses of x compile testless
  CHECK(r.stats.dynTagTests == 1);
  CHECK(r.stats.staticTestsEliminated >= 2);
  // the same program under baseline pays every probe
  auto base = run_text("function g(x) { return x + x + x; }\nprint(g(1));",
                       ExecMode::Baseline);
  CHECK(base.stats.dynTagTests == 4);
  CHECK(base.stats.staticTestsEliminated == 0);
}

TEST_CASE("per-site tallies sum to the dynamic tag test count") {
  for (const char* name : {"tree-sum.js", "f.js", "arrays.js", "mixed-return.js"}) {
    INFO(name);
    ProgramIR prog = compile_source(corpus_source(name));
    Engine eng(prog, Features::for_mode(ExecMode::Baseline, {}, false, false));
    REQUIRE(eng.run().status == RunStatus::Ok);
    uint64_t sum = 0;
    for (const auto& [key, o] : eng.stats().siteOutcomes) sum += o.execCount;
    CHECK(sum == eng.stats().dynTagTests);
  }
}

TEST_CASE("run JSON follows schema v1") {
  ProgramIR prog = compile_source(corpus_source("f.js"));
  RunConfig cfg;
  cfg.mode = ExecMode::Intra;
  RunOutcome out = run_program(prog, cfg);
  nlohmann::json j = run_json("corpus/f.js", cfg.mode, out);
  CHECK(j["schema"] == 1);
  CHECK(j["mode"] == "intra");
  CHECK(j["status"] == "ok");
  for (const char* key :
       {"dynTagTests", "dynShapeTests", "staticTestsEliminated", "overflowChecks",
        "continuationsCompiled", "continuationsInvalidated",
        "functionsCausingInvalidation", "knownCalleeCalls", "totalCalls",
        "returnTagKnownDynamic", "totalReturns", "emittedInstrCount", "compileEvents",
        "knownCalleeRate", "returnTagKnownRate", "versionsPerBlock",
        "entryPointsPerFunction"}) {
    INFO(key);
    CHECK(j["counters"].contains(key));
  }
  CHECK(j["counters"]["knownCalleeCalls"].get<uint64_t>() <=
        j["counters"]["totalCalls"].get<uint64_t>());
  CHECK(j["counters"]["returnTagKnownDynamic"].get<uint64_t>() <=
        j["counters"]["totalReturns"].get<uint64_t>());
}

TEST_CASE("matrix proportions divide by the baseline run") {
  ProgramIR prog = compile_source(corpus_source("f.js"));
  std::vector<MatrixCell> cells;
  for (ExecMode m : matrix_modes()) {
    RunConfig cfg;
    cfg.mode = m;
    cells.push_back({"f.js", m, run_program(prog, cfg)});
  }
  MatrixReport rep = build_matrix_report(cells);
  double base = rep.doc["proportions"]["f.js"]["baseline"];
  CHECK(base == 1.0);
  double intra = rep.doc["proportions"]["f.js"]["intra"];
  double cont = rep.doc["proportions"]["f.js"]["entry+cont"];
  CHECK(intra < 1.0);
  CHECK(cont < intra);
  CHECK(rep.doc["geomeanProportion"].contains("entry+cont"));
  // CSV: header + one line per cell
  size_t lines = std::count(rep.csv.begin(), rep.csv.end(), '\n');
  CHECK(lines == cells.size() + 1);
}

TEST_CASE("a matrix without a baseline run is an error") {
  ProgramIR prog = compile_source(corpus_source("f.js"));
  RunConfig cfg;
  cfg.mode = ExecMode::Intra;
  std::vector<MatrixCell> cells = {{"f.js", ExecMode::Intra, run_program(prog, cfg)}};
  CHECK_THROWS_AS(build_matrix_report(cells), MissingBaseline);
  CHECK_THROWS_AS(build_matrix_report({}), MissingBaseline);
}

TEST_CASE("matrix output is deterministic across invocations") {
  ProgramIR prog = compile_source(corpus_source("tree-sum.js"));
  auto build = [&]() {
    std::vector<MatrixCell> cells;
    for (ExecMode m : matrix_modes()) {
      RunConfig cfg;
      cfg.mode = m;
      cells.push_back({"tree-sum.js", m, run_program(prog, cfg)});
    }
    return build_matrix_report(cells);
  };
  MatrixReport a = build();
  MatrixReport b = build();
  CHECK(a.csv == b.csv);
  CHECK(a.doc.dump() == b.doc.dump());
}

TEST_CASE("proportion arithmetic: 150 remaining of 1000 is 0.15") {
  // synthesized cells: only the counters matter to the report
  MatrixCell base;
  base.program = "p";
  base.mode = ExecMode::Baseline;
  base.outcome.stats.dynTagTests = 1000;
  MatrixCell cont = base;
  cont.mode = ExecMode::EntryCont;
  cont.outcome.stats.dynTagTests = 150;
  MatrixReport rep = build_matrix_report({base, cont});
  CHECK(rep.doc["proportions"]["p"]["entry+cont"].get<double>() == 0.15);
  CHECK(rep.doc["proportions"]["p"]["baseline"].get<double>() == 1.0);
}
