#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bbvm {

struct SrcLoc {
  uint32_t line = 0;
  uint32_t column = 0;
};

// Fatal front-end errors. The VM itself never throws these at run time;
// run-time failures surface as Halt results.
struct LexError : std::runtime_error {
  SrcLoc loc;
  LexError(SrcLoc l, const std::string& msg)
      : std::runtime_error("lex error at " + std::to_string(l.line) + ":" +
                           std::to_string(l.column) + ": " + msg),
        loc(l) {}
};

struct ParseError : std::runtime_error {
  SrcLoc loc;
  ParseError(SrcLoc l, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(l.line) + ":" +
                           std::to_string(l.column) + ": " + msg),
        loc(l) {}
};

struct LowerError : std::runtime_error {
  SrcLoc loc;
  LowerError(SrcLoc l, const std::string& msg)
      : std::runtime_error("lowering error at " + std::to_string(l.line) +
                           ":" + std::to_string(l.column) + ": " + msg),
        loc(l) {}
};

// Signals a bug in the specializer itself (e.g. a context refinement that
// contradicts existing knowledge). Never raised by well-formed programs.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

using RegId = uint16_t;
using BlockId = uint32_t;
using FuncId = uint32_t;

inline constexpr RegId kNoReg = 0xffff;
inline constexpr BlockId kNoBlock = 0xffffffff;
inline constexpr FuncId kNoFunc = 0xffffffff;

}  // namespace bbvm
