// bbvm — a miniature JS-subset VM built around lazy basic block versioning
// with typed object shapes and interprocedural (entry point + call
// continuation) specialization, instrumented to count dynamic type tests.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bbvm/fuzz.hpp"
#include "bbvm/refinterp.hpp"
#include "bbvm/report.hpp"
#include "bbvm/vm.hpp"

using namespace bbvm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitHalt = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

int status_exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return kExitOk;
    case RunStatus::Halted:
    case RunStatus::DeterminismViolation: return kExitHalt;
    case RunStatus::ValidationFailure:
    case RunStatus::Internal: return kExitInternal;
  }
  return kExitInternal;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

std::string run_csv(const std::string& program, ExecMode mode, const Stats& s) {
  std::string csv =
      "program,mode,dynTagTests,dynShapeTests,staticTestsEliminated,"
      "overflowChecks,continuationsCompiled,continuationsInvalidated,"
      "knownCalleeCalls,totalCalls,returnTagKnownDynamic,totalReturns,"
      "emittedInstrCount,compileEvents,executedInstrs\n";
  char line[512];
  snprintf(line, sizeof line,
           "%s,%s,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu\n",
           program.c_str(), mode_name(mode), (unsigned long long)s.dynTagTests,
           (unsigned long long)s.dynShapeTests,
           (unsigned long long)s.staticTestsEliminated,
           (unsigned long long)s.overflowChecks,
           (unsigned long long)s.continuationsCompiled,
           (unsigned long long)s.continuationsInvalidated,
           (unsigned long long)s.knownCalleeCalls, (unsigned long long)s.totalCalls,
           (unsigned long long)s.returnTagKnownDynamic,
           (unsigned long long)s.totalReturns,
           (unsigned long long)s.emittedInstrRetained,
           (unsigned long long)s.compileEvents, (unsigned long long)s.executedInstrs);
  return csv + line;
}

struct CommonOpts {
  std::string mode = "entry+cont";
  uint32_t maxVers = 5;
  uint32_t maxEntries = 5;
  bool validate = false;
  bool entryShapes = false;
};

void add_common(CLI::App* cmd, CommonOpts* o) {
  cmd->add_option("--mode", o->mode,
                  "baseline | intra | shapes | entry | entry+cont | oracle");
  cmd->add_option("--maxvers", o->maxVers, "max specialized versions per block");
  cmd->add_option("--maxentries", o->maxEntries, "max specialized entry points");
  cmd->add_flag("--validate", o->validate, "check context/runtime agreement");
  cmd->add_flag("--entry-shapes", o->entryShapes, "keep shapes in entry-point keys");
}

RunConfig make_config(const CommonOpts& o) {
  RunConfig cfg;
  auto m = parse_mode(o.mode);
  if (!m) throw CLI::ValidationError("--mode", "unknown mode '" + o.mode + "'");
  cfg.mode = *m;
  cfg.limits.maxVers = o.maxVers;
  cfg.limits.maxEntries = o.maxEntries;
  cfg.validate = o.validate;
  cfg.entryShapes = o.entryShapes;
  return cfg;
}

int cmd_run(const std::string& path, const CommonOpts& o, const std::string& statsPath,
            const std::string& csvPath, bool dumpIr, bool dumpShapes,
            bool dumpVersions) {
  SourceProgram src = load_source(path);
  ProgramIR prog = compile_source(src);
  if (dumpIr) std::cout << dump_ir(prog);
  RunConfig cfg = make_config(o);

  if (cfg.mode == ExecMode::Oracle) {
    RunOutcome out = run_program(prog, cfg);
    std::cout << out.exec.output;
    std::cerr << "oracle: baseline " << out.oracle.baselineTagTests
              << " tag tests, remaining " << out.oracle.remainingTagTests << " ("
              << out.oracle.removedSites << " sites removed, "
              << out.oracle.polymorphicSites << " polymorphic)\n";
    if (!statsPath.empty())
      write_file(statsPath, run_json(path, cfg.mode, out).dump(2) + "\n");
    if (!csvPath.empty()) write_file(csvPath, run_csv(path, cfg.mode, out.stats));
    if (out.exec.status != RunStatus::Ok)
      std::cerr << "error: " << out.exec.message << "\n";
    return status_exit_code(out.exec.status);
  }

  Features feat = Features::for_mode(cfg.mode, cfg.limits, cfg.entryShapes, cfg.validate);
  Engine eng(prog, feat, cfg.limits);
  ExecResult res = eng.run();
  std::cout << res.output;
  if (dumpShapes) std::cerr << eng.dump_shapes();
  if (dumpVersions) std::cerr << eng.dump_versions();
  RunOutcome out;
  out.exec = res;
  out.stats = eng.stats();
  if (!statsPath.empty())
    write_file(statsPath, run_json(path, cfg.mode, out).dump(2) + "\n");
  if (!csvPath.empty()) write_file(csvPath, run_csv(path, cfg.mode, out.stats));
  if (res.status != RunStatus::Ok) std::cerr << "error: " << res.message << "\n";
  return status_exit_code(res.status);
}

int cmd_matrix(const std::vector<std::string>& paths, const CommonOpts& o,
               const std::string& outPath, const std::string& csvPath) {
  std::vector<MatrixCell> cells;
  RunConfig cfg = make_config(o);
  for (const std::string& path : paths) {
    SourceProgram src = load_source(path);
    ProgramIR prog = compile_source(src);
    for (ExecMode m : matrix_modes()) {
      RunConfig c = cfg;
      c.mode = m;
      MatrixCell cell;
      cell.program = path;
      cell.mode = m;
      cell.outcome = run_program(prog, c);
      if (cell.outcome.exec.status != RunStatus::Ok) {
        std::cerr << path << " [" << mode_name(m)
                  << "]: " << cell.outcome.exec.message << "\n";
        return status_exit_code(cell.outcome.exec.status);
      }
      cells.push_back(std::move(cell));
    }
  }
  MatrixReport rep = build_matrix_report(cells);

  // human-readable proportion table
  printf("%-28s", "program");
  for (ExecMode m : matrix_modes()) printf("%12s", mode_name(m));
  printf("\n");
  for (const std::string& path : paths) {
    printf("%-28s", path.c_str());
    for (ExecMode m : matrix_modes()) {
      double p = rep.doc["proportions"][path][mode_name(m)];
      printf("%12.4f", p);
    }
    printf("\n");
  }
  printf("%-28s", "geomean");
  for (ExecMode m : matrix_modes()) {
    double p = rep.doc["geomeanProportion"][mode_name(m)];
    printf("%12.4f", p);
  }
  printf("\n");

  if (!outPath.empty()) write_file(outPath, rep.doc.dump(2) + "\n");
  if (!csvPath.empty()) write_file(csvPath, rep.csv);
  return kExitOk;
}

int cmd_bench(const std::string& path, const CommonOpts& o, uint32_t warmup,
              uint32_t timing, const std::string& statsPath) {
  SourceProgram src = load_source(path);
  ProgramIR prog = compile_source(src);
  RunConfig cfg = make_config(o);
  if (cfg.mode == ExecMode::Oracle)
    throw CLI::ValidationError("--mode", "bench does not support oracle mode");
  Features feat = Features::for_mode(cfg.mode, cfg.limits, cfg.entryShapes, cfg.validate);
  Engine eng(prog, feat, cfg.limits);
  ExecResult res = eng.run();
  if (res.status != RunStatus::Ok) {
    std::cerr << "error: " << res.message << "\n";
    return status_exit_code(res.status);
  }
  for (uint32_t i = 0; i < warmup; ++i) {
    ExecResult r = eng.invoke_global("benchmarkRun");
    if (r.status != RunStatus::Ok) {
      std::cerr << "error: " << r.message << "\n";
      return status_exit_code(r.status);
    }
  }
  std::vector<double> samples;
  std::vector<uint64_t> instrs;
  for (uint32_t i = 0; i < timing; ++i) {
    uint64_t before = eng.stats().executedInstrs;
    auto t0 = std::chrono::steady_clock::now();
    ExecResult r = eng.invoke_global("benchmarkRun");
    auto t1 = std::chrono::steady_clock::now();
    if (r.status != RunStatus::Ok) {
      std::cerr << "error: " << r.message << "\n";
      return status_exit_code(r.status);
    }
    samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    instrs.push_back(eng.stats().executedInstrs - before);
  }
  double total = 0;
  for (double s : samples) total += s;
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  double median = sorted.empty() ? 0 : sorted[sorted.size() / 2];
  uint64_t medInstr = 0;
  if (!instrs.empty()) {
    std::vector<uint64_t> si = instrs;
    std::sort(si.begin(), si.end());
    medInstr = si[si.size() / 2];
  }
  printf("bench %s mode=%s warmup=%u timing=%u\n", path.c_str(), mode_name(cfg.mode),
         warmup, timing);
  printf("  median %.3f ms, total %.3f ms over %zu samples\n", median, total,
         samples.size());
  printf("  dynamic instructions per iteration (median): %llu\n",
         (unsigned long long)medInstr);
  printf("  dynamic tag tests (cumulative): %llu\n",
         (unsigned long long)eng.stats().dynTagTests);
  if (!statsPath.empty()) {
    nlohmann::json j;
    j["schema"] = kStatsSchemaVersion;
    j["program"] = path;
    j["mode"] = mode_name(cfg.mode);
    j["warmupIters"] = warmup;
    j["timingIters"] = timing;
    j["samplesMs"] = samples;
    j["medianMs"] = median;
    j["totalMs"] = total;
    j["instrsPerIteration"] = instrs;
    j["counters"] = stats_json(eng.stats());
    write_file(statsPath, j.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_fuzz(uint64_t seed, uint32_t count, bool validate, bool verbose) {
  uint32_t failures = 0;
  for (uint32_t i = 0; i < count; ++i) {
    uint64_t s = seed + i;
    std::string text = generate_fuzz_program(s);
    SourceProgram src = source_from_string(text, "fuzz-" + std::to_string(s));
    ProgramIR prog;
    Ast ast;
    try {
      ast = Parser(tokenize(src)).run();
      prog = Lowerer(ast).run();
    } catch (const std::exception& e) {
      std::cerr << "seed " << s << ": frontend failure: " << e.what() << "\n";
      ++failures;
      continue;
    }
    RefInterp::Result ref = RefInterp(ast).run();
    for (ExecMode m : {ExecMode::Baseline, ExecMode::Intra, ExecMode::Shapes,
                       ExecMode::Entry, ExecMode::EntryCont}) {
      Engine eng(prog, Features::for_mode(m, {}, false, validate));
      ExecResult res = eng.run();
      bool ok = (res.status == RunStatus::Ok) == !ref.halted && res.output == ref.output;
      if (ok && m == ExecMode::Baseline && !ref.halted)
        ok = eng.stats().dynTagTests == ref.implicitTests;
      if (!ok) {
        ++failures;
        std::cerr << "seed " << s << " [" << mode_name(m) << "]: DIVERGENCE\n";
        std::cerr << "  ref: halted=" << ref.halted << " tests=" << ref.implicitTests
                  << "\n  vm: status=" << status_name(res.status)
                  << " tests=" << eng.stats().dynTagTests << "\n";
        if (verbose) std::cerr << text << "\n";
        break;
      }
    }
  }
  if (failures) {
    std::cerr << failures << " divergent seed(s)\n";
    return kExitInternal;
  }
  printf("fuzz: %u program(s) agree across all modes\n", count);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bbvm: basic-block-versioning mini VM"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run a program under one mode");
  std::string runPath, runStats, runCsv;
  CommonOpts runOpts;
  bool dumpIr = false, dumpShapes = false, dumpVersions = false;
  run->add_option("program", runPath, "program file")->required();
  add_common(run, &runOpts);
  run->add_option("--stats", runStats, "write stats JSON here");
  run->add_option("--csv", runCsv, "write stats CSV here");
  run->add_flag("--dump-ir", dumpIr, "print lowered IR before running");
  run->add_flag("--dump-shapes", dumpShapes, "print the shape transition tree");
  run->add_flag("--dump-versions", dumpVersions, "print versions and entry points");

  // matrix
  auto* matrix = app.add_subcommand("matrix", "run programs across all modes");
  std::vector<std::string> matrixPaths;
  std::string matrixOut, matrixCsv;
  CommonOpts matrixOpts;
  matrix->add_option("programs", matrixPaths, "program files")->required();
  add_common(matrix, &matrixOpts);
  matrix->add_option("--out", matrixOut, "write matrix JSON here");
  matrix->add_option("--csv", matrixCsv, "write matrix CSV here");

  // bench
  auto* bench = app.add_subcommand("bench", "benchmark via benchmarkRun()");
  std::string benchPath, benchStats;
  CommonOpts benchOpts;
  uint32_t warmup = 10, timing = 10;
  bench->add_option("program", benchPath, "program file")->required();
  add_common(bench, &benchOpts);
  bench->add_option("--warmup", warmup, "warmup iterations");
  bench->add_option("--timing", timing, "timing iterations");
  bench->add_option("--stats", benchStats, "write bench JSON here");

  // fuzz
  auto* fuzz = app.add_subcommand("fuzz", "differential fuzzing vs the reference");
  uint64_t seed = 1;
  uint32_t count = 100;
  bool fuzzValidate = true, fuzzVerbose = false;
  fuzz->add_option("--seed", seed, "first seed");
  fuzz->add_option("--count", count, "number of programs");
  fuzz->add_flag("--validate,!--no-validate", fuzzValidate, "soundness checks");
  fuzz->add_flag("--verbose", fuzzVerbose, "print diverging programs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed())
      return cmd_run(runPath, runOpts, runStats, runCsv, dumpIr, dumpShapes,
                     dumpVersions);
    if (matrix->parsed()) return cmd_matrix(matrixPaths, matrixOpts, matrixOut, matrixCsv);
    if (bench->parsed()) return cmd_bench(benchPath, benchOpts, warmup, timing, benchStats);
    if (fuzz->parsed()) return cmd_fuzz(seed, count, fuzzValidate, fuzzVerbose);
  } catch (const LexError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHalt;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHalt;
  } catch (const LowerError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHalt;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHalt;
  }
  return kExitUsage;
}
