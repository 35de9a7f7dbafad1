#pragma once

#include <memory>
#include <string>

#include "bbvm/engine.hpp"
#include "bbvm/lower.hpp"
#include "bbvm/oracle.hpp"
#include "bbvm/parser.hpp"
#include "bbvm/verify.hpp"

namespace bbvm {

// Front-to-back pipeline: source -> tokens -> AST -> verified IR.
inline ProgramIR compile_source(const SourceProgram& src) {
  Ast ast = Parser(tokenize(src)).run();
  ProgramIR prog = Lowerer(ast).run();
  auto violations = verify_program(prog);
  if (!violations.empty())
    throw InternalError("IR verification failed: " + violations.front());
  return prog;
}

struct RunConfig {
  ExecMode mode = ExecMode::EntryCont;
  Limits limits;
  bool validate = false;
  bool entryShapes = false;
};

struct RunOutcome {
  ExecResult exec;
  Stats stats;
  bool isOracle = false;
  OracleResult oracle;  // filled for ExecMode::Oracle
};

// One complete run of a program under one mode. Oracle mode performs the
// record + rerun pair and reports the rerun's counters.
inline RunOutcome run_program(const ProgramIR& prog, const RunConfig& cfg) {
  RunOutcome out;
  if (cfg.mode == ExecMode::Oracle) {
    out.isOracle = true;
    out.oracle = run_oracle(prog, cfg.limits, cfg.validate);
    out.exec = out.oracle.rerun;
    out.stats = out.oracle.rerunStats;
    return out;
  }
  Features feat = Features::for_mode(cfg.mode, cfg.limits, cfg.entryShapes, cfg.validate);
  Engine eng(prog, feat, cfg.limits);
  out.exec = eng.run();
  out.stats = eng.stats();
  return out;
}

inline const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::Halted: return "halt";
    case RunStatus::DeterminismViolation: return "determinism-violation";
    case RunStatus::ValidationFailure: return "validation-failure";
    case RunStatus::Internal: return "internal-error";
  }
  return "?";
}

}  // namespace bbvm
