#pragma once

#include <string>

#include "bbvm/refinterp.hpp"
#include "bbvm/report.hpp"
#include "bbvm/vm.hpp"

namespace bbvm::test {

inline std::string corpus_path(const std::string& name) {
  return std::string(BBVM_CORPUS_DIR) + "/" + name;
}

inline SourceProgram corpus_source(const std::string& name) {
  return load_source(corpus_path(name));
}

inline Ast parse_text(const std::string& text) {
  return Parser(tokenize(source_from_string(text))).run();
}

inline ProgramIR compile_text(const std::string& text) {
  return compile_source(source_from_string(text));
}

struct ModeRun {
  ExecResult exec;
  Stats stats;
};

inline ModeRun run_text(const std::string& text, ExecMode mode, bool validate = true,
                        Limits limits = {}) {
  ProgramIR prog = compile_text(text);
  Engine eng(prog, Features::for_mode(mode, limits, false, validate), limits);
  ModeRun r;
  r.exec = eng.run();
  r.stats = eng.stats();
  return r;
}

inline FuncId fn_by_name(const ProgramIR& prog, const std::string& name) {
  for (const FunctionIR& f : prog.functions)
    if (f.name == name && f.builtin == BuiltinKind::None) return f.id;
  return kNoFunc;
}

inline const char* kRecSumFn =
    "function f(n) {\n"
    "    if (n == 0)\n"
    "        return 0;\n"
    "    else\n"
    "        return n + f(n-1);\n"
    "}\n";

inline std::string rec_sum_driver(int n) {
  return std::string(kRecSumFn) + "print(f(" + std::to_string(n) + "));\n";
}

}  // namespace bbvm::test
