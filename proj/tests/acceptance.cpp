// Acceptance suite: each criterion prints one PASS/FAIL line; the binary
// exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "bbvm/fuzz.hpp"
#include "bbvm/oracle.hpp"
#include "bbvm/refinterp.hpp"
#include "bbvm/report.hpp"
#include "bbvm/vm.hpp"

using namespace bbvm;

namespace {

int failures = 0;

void report(int criterion, const std::string& what, bool ok,
            const std::string& detail = "") {
  printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion, what.c_str(),
         detail.empty() ? "" : " — ", detail.c_str());
  if (!ok) ++failures;
}

std::string corpus(const std::string& name) {
  return std::string(BBVM_CORPUS_DIR) + "/" + name;
}

std::vector<std::string> corpus_files() {
  namespace fs = std::filesystem;
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(BBVM_CORPUS_DIR))
    if (e.path().extension() == ".js") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   t0)
      .count();
}

const std::vector<ExecMode> kLadder = {ExecMode::Baseline, ExecMode::Intra,
                                       ExecMode::Shapes, ExecMode::Entry,
                                       ExecMode::EntryCont};

FuncId fn_by_name(const ProgramIR& prog, const std::string& name) {
  for (const FunctionIR& f : prog.functions)
    if (f.name == name && f.builtin == BuiltinKind::None) return f.id;
  return kNoFunc;
}

uint64_t tag_tests(const ProgramIR& prog, ExecMode m) {
  Engine eng(prog, Features::for_mode(m, {}, false, false));
  ExecResult res = eng.run();
  if (res.status != RunStatus::Ok) return UINT64_MAX;
  return eng.stats().dynTagTests;
}

// 1. The tree-sum program completes without the throw (sum=502) in every
//    mode, under a second per mode.
void criterion1() {
  ProgramIR prog = compile_source(load_source(corpus("tree-sum.js")));
  bool ok = true;
  std::string detail;
  std::vector<ExecMode> modes = kLadder;
  modes.push_back(ExecMode::Oracle);
  for (ExecMode m : modes) {
    auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg;
    cfg.mode = m;
    RunOutcome out = run_program(prog, cfg);
    double ms = ms_since(t0);
    if (out.exec.status != RunStatus::Ok || ms >= 1000.0) {
      ok = false;
      detail += std::string(mode_name(m)) + ":" + status_name(out.exec.status) + " ";
    }
  }
  // the sum value itself, observed directly
  SourceProgram probe = load_source(corpus("tree-sum.js"));
  probe.source += "\nprint(sum(root));\n";
  RunConfig cfg;
  cfg.mode = ExecMode::EntryCont;
  RunOutcome out = run_program(compile_source(probe), cfg);
  if (out.exec.output != "502\n") {
    ok = false;
    detail += "sum!=502 ";
  }
  report(1, "tree-sum runs in all six modes with sum 502, <1s each", ok, detail);
}

// 2. Recursive sum counts: intra = 2N+c with frozen c=1; entry+cont O(1) in N.
void criterion2() {
  const uint64_t frozenC = 1;
  bool ok = true;
  std::string detail;
  std::vector<uint64_t> contCounts;
  for (int n : {10, 100, 1000}) {
    std::string text = "function f(n) {\n    if (n == 0)\n        return 0;\n"
                       "    else\n        return n + f(n-1);\n}\nprint(f(" +
                       std::to_string(n) + "));\n";
    ProgramIR prog = compile_source(source_from_string(text));
    uint64_t intra = tag_tests(prog, ExecMode::Intra);
    if (intra != 2 * (uint64_t)n + frozenC) {
      ok = false;
      detail += "intra(" + std::to_string(n) + ")=" + std::to_string(intra) + " ";
    }
    contCounts.push_back(tag_tests(prog, ExecMode::EntryCont));
  }
  for (uint64_t c : contCounts)
    if (c != contCounts[0] || c > 8) ok = false;
  if (!ok && !contCounts.empty())
    detail += "entry+cont=" + std::to_string(contCounts[0]);
  report(2, "f(N): intra tag tests = 2N+1, entry+cont O(1) for N in {10,100,1000}",
         ok, detail);
}

// 3. Entry-point structure: two entry points for sum; the object version
//    has zero tag tests and exactly two shape-test sites.
void criterion3() {
  ProgramIR prog = compile_source(load_source(corpus("tree-sum.js")));
  Engine eng(prog, Features::for_mode(ExecMode::EntryCont, {}, false, false));
  ExecResult res = eng.run();
  bool ok = res.status == RunStatus::Ok;
  std::string detail;
  FuncId sum = fn_by_name(prog, "sum");
  if (sum == kNoFunc) ok = false;
  if (ok) {
    uint32_t spec = eng.specialized_entry_count(sum);
    if (spec != 2) {
      ok = false;
      detail += "entries=" + std::to_string(spec) + " ";
    }
    bool sawNull = false, sawObject = false;
    for (const auto& e : eng.entry_summaries(sum)) {
      if (e.isGeneric) continue;
      if (e.argTags.find("null") != std::string::npos) sawNull = true;
      if (e.argTags.find("object") != std::string::npos) {
        sawObject = true;
        if (e.tagTests != 0 || e.shapeTests != 2) {
          ok = false;
          detail += "object entry tag=" + std::to_string(e.tagTests) +
                    " shape=" + std::to_string(e.shapeTests) + " ";
        }
      }
    }
    if (!sawNull || !sawObject) {
      ok = false;
      detail += "missing null/object entry ";
    }
    std::string dump = eng.dump_versions();
    if (dump.find("tag_tests=0 shape_tests=2") == std::string::npos) {
      ok = false;
      detail += "dump mismatch ";
    }
  }
  report(3, "sum has entries for null and object; object version: 0 tag tests, "
            "2 shape tests", ok, detail);
}

// 4. Mode-ladder monotonicity, with strict drops for tree-sum and f at the
//    intra and entry+cont steps.
void criterion4() {
  bool ok = true;
  std::string detail;
  for (const std::string& path : corpus_files()) {
    ProgramIR prog = compile_source(load_source(path));
    uint64_t prev = UINT64_MAX;
    std::vector<uint64_t> counts;
    for (ExecMode m : kLadder) {
      uint64_t c = tag_tests(prog, m);
      counts.push_back(c);
      if (c > prev) {
        ok = false;
        detail += path + ":" + mode_name(m) + " increased ";
      }
      prev = c;
    }
    bool isStrictProgram = path.find("tree-sum.js") != std::string::npos ||
                           path.find("/f.js") != std::string::npos;
    if (isStrictProgram) {
      if (!(counts[0] > counts[1])) {  // baseline -> intra strict
        ok = false;
        detail += path + ": no intra drop ";
      }
      if (!(counts[3] > counts[4])) {  // entry -> entry+cont strict
        ok = false;
        detail += path + ": no cont drop ";
      }
    }
  }
  report(4, "tag tests non-increasing along the mode ladder; strict drops on "
            "tree-sum and f", ok, detail);
}

// 5. Interprocedural BBV beats the perfect static analysis on tree-sum.
void criterion5() {
  ProgramIR prog = compile_source(load_source(corpus("tree-sum.js")));
  OracleResult o = run_oracle(prog);
  uint64_t cont = tag_tests(prog, ExecMode::EntryCont);
  bool ok = o.rerun.status == RunStatus::Ok && o.remainingTagTests >= 511 &&
            cont < o.remainingTagTests;
  report(5, "tree-sum: entry+cont remaining tests < oracle remaining (>=511)", ok,
         "entry+cont=" + std::to_string(cont) +
             " oracle=" + std::to_string(o.remainingTagTests));
}

// 6. Invalidation protocol on mixed-return.js under validation.
void criterion6() {
  ProgramIR prog = compile_source(load_source(corpus("mixed-return.js")));
  Engine eng(prog, Features::for_mode(ExecMode::EntryCont, {}, false,
                                      /*validate=*/true));
  ExecResult res = eng.run();
  bool ok = res.status == RunStatus::Ok && res.output == "done\n" &&
            eng.stats().continuationsInvalidated >= 1;
  report(6, "mixed-return: correct output, >=1 invalidation, zero tag mismatches",
         ok,
         "status=" + std::string(status_name(res.status)) +
             " invalidated=" + std::to_string(eng.stats().continuationsInvalidated));
}

// 7. Version cap on the megamorphic block.
void criterion7() {
  ProgramIR prog = compile_source(load_source(corpus("megamorphic.js")));
  Ast ast = Parser(tokenize(load_source(corpus("megamorphic.js")))).run();
  auto ref = RefInterp(ast).run();
  Features feat = Features::for_mode(ExecMode::EntryCont, {}, false, true);
  Engine eng(prog, feat);
  ExecResult res = eng.run();
  bool ok = res.status == RunStatus::Ok && res.output == ref.output;
  bool capped = false;
  for (const FunctionIR& fn : prog.functions) {
    if (fn.builtin != BuiltinKind::None) continue;
    for (BlockId b = 0; b < (BlockId)fn.blocks.size(); ++b) {
      auto c = eng.block_version_count(fn.id, b);
      if (c.nonGeneric > feat.maxVers) ok = false;
      if (c.nonGeneric == feat.maxVers && c.hasGeneric) capped = true;
    }
  }
  ok = ok && capped;
  report(7, "megamorphic block ends at the version cap plus one generic version",
         ok);
}

// 8. Differential soundness over 500 seeded fuzz programs, all five modes.
void criterion8() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  int checked = 0;
  for (uint64_t seed = 1; seed <= 500; ++seed) {
    std::string text = generate_fuzz_program(seed);
    SourceProgram src = source_from_string(text, "fuzz-" + std::to_string(seed));
    Ast ast;
    ProgramIR prog;
    try {
      ast = Parser(tokenize(src)).run();
      prog = Lowerer(ast).run();
    } catch (const std::exception& e) {
      ok = false;
      detail = "seed " + std::to_string(seed) + " frontend: " + e.what();
      break;
    }
    RefInterp::Result ref = RefInterp(ast).run();
    if (ref.halted) {
      ok = false;
      detail = "seed " + std::to_string(seed) + " reference halted: " + ref.message;
      break;
    }
    for (ExecMode m : kLadder) {
      Engine eng(prog, Features::for_mode(m, {}, false, /*validate=*/true));
      ExecResult res = eng.run();
      if (res.status != RunStatus::Ok || res.output != ref.output ||
          (m == ExecMode::Baseline && eng.stats().dynTagTests != ref.implicitTests)) {
        ok = false;
        detail = "seed " + std::to_string(seed) + " mode " + mode_name(m) + " " +
                 status_name(res.status);
        break;
      }
    }
    if (!ok) break;
    ++checked;
  }
  double sec = ms_since(t0) / 1000.0;
  if (sec >= 300.0) {
    ok = false;
    detail += " overtime";
  }
  report(8, "500 fuzz programs agree with the reference across all five modes", ok,
         detail.empty() ? std::to_string(checked) + " programs in " +
                              std::to_string((int)sec) + "s"
                        : detail);
}

// 9. The matrix report emits this artifact's own averages.
void criterion9() {
  std::vector<MatrixCell> cells;
  bool ok = true;
  for (const std::string& path : corpus_files()) {
    ProgramIR prog = compile_source(load_source(path));
    for (ExecMode m : matrix_modes()) {
      RunConfig cfg;
      cfg.mode = m;
      MatrixCell cell{path, m, run_program(prog, cfg)};
      if (cell.outcome.exec.status != RunStatus::Ok) ok = false;
      cells.push_back(std::move(cell));
    }
  }
  MatrixReport rep = build_matrix_report(cells);
  for (ExecMode m : matrix_modes())
    if (!rep.doc["geomeanProportion"].contains(mode_name(m))) ok = false;
  double gmCont = rep.doc["geomeanProportion"]["entry+cont"];
  double gmIntra = rep.doc["geomeanProportion"]["intra"];
  if (!(gmCont < gmIntra && gmCont < 1.0)) ok = false;
  // known-callee and return-tag rates are in every run document
  for (const auto& r : rep.doc["runs"]) {
    if (!r["counters"].contains("knownCalleeRate") ||
        !r["counters"].contains("returnTagKnownRate"))
      ok = false;
  }
  char detail[160];
  snprintf(detail, sizeof detail,
           "geomean remaining: intra=%.3f shapes=%.3f entry=%.3f entry+cont=%.3f "
           "oracle=%.3f",
           gmIntra, rep.doc["geomeanProportion"]["shapes"].get<double>(),
           rep.doc["geomeanProportion"]["entry"].get<double>(), gmCont,
           rep.doc["geomeanProportion"]["oracle"].get<double>());
  report(9, "matrix emits remaining-test proportions and rate averages", ok, detail);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (failures) {
    printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  printf("all acceptance criteria passed\n");
  return 0;
}
