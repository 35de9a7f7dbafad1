#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "bbvm/common.hpp"

namespace bbvm {

struct SourceProgram {
  std::string path;
  std::string source;  // newline-normalized to LF
};

inline std::string normalize_newlines(std::string text) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

inline SourceProgram source_from_string(std::string text, std::string name = "<memory>") {
  return SourceProgram{std::move(name), normalize_newlines(std::move(text))};
}

inline SourceProgram load_source(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return source_from_string(ss.str(), path);
}

}  // namespace bbvm
