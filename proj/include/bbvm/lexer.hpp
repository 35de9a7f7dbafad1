#pragma once

#include <cstdlib>
#include <string>
#include <vector>

#include "bbvm/common.hpp"
#include "bbvm/source.hpp"

namespace bbvm {

enum class Tok : uint8_t {
  Ident, Int, Float, Str,
  // keywords
  KwFunction, KwVar, KwIf, KwElse, KwWhile, KwReturn, KwThrow, KwNew,
  KwNull, KwTrue, KwFalse, KwThis,
  // punctuation / operators
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Comma, Semi, Dot, Colon,
  Assign, PlusAssign, MinusAssign, StarAssign, SlashAssign,
  EqEq, NotEq, Lt, Le, Gt, Ge,
  Plus, Minus, Star, Slash, Percent,
  AndAnd, OrOr, Not,
  Eof,
};

struct Token {
  Tok kind;
  SrcLoc loc;
  std::string text;   // ident / string payload
  int32_t ival = 0;   // Int payload
  double fval = 0.0;  // Float payload
};

inline const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "int literal";
    case Tok::Float: return "float literal";
    case Tok::Str: return "string literal";
    case Tok::KwFunction: return "'function'";
    case Tok::KwVar: return "'var'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwWhile: return "'while'";
    case Tok::KwReturn: return "'return'";
    case Tok::KwThrow: return "'throw'";
    case Tok::KwNew: return "'new'";
    case Tok::KwNull: return "'null'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwThis: return "'this'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Dot: return "'.'";
    case Tok::Colon: return "':'";
    case Tok::Assign: return "'='";
    case Tok::PlusAssign: return "'+='";
    case Tok::MinusAssign: return "'-='";
    case Tok::StarAssign: return "'*='";
    case Tok::SlashAssign: return "'/='";
    case Tok::EqEq: return "'=='";
    case Tok::NotEq: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Percent: return "'%'";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Not: return "'!'";
    case Tok::Eof: return "end of input";
  }
  return "?";
}

class Lexer {
 public:
  explicit Lexer(const SourceProgram& src) : src_(src.source) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token t = next();
      bool done = t.kind == Tok::Eof;
      out.push_back(std::move(t));
      if (done) break;
    }
    return out;
  }

 private:
  const std::string& src_;
  size_t pos_ = 0;
  uint32_t line_ = 1;
  uint32_t col_ = 1;

  SrcLoc here() const { return SrcLoc{line_, col_}; }
  bool eof() const { return pos_ >= src_.size(); }
  char peek(size_t k = 0) const {
    return pos_ + k < src_.size() ? src_[pos_ + k] : '\0';
  }
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_trivia() {
    for (;;) {
      while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\n')) advance();
      if (peek() == '/' && peek(1) == '/') {
        while (!eof() && peek() != '\n') advance();
        continue;
      }
      if (peek() == '/' && peek(1) == '*') {
        SrcLoc start = here();
        advance();
        advance();
        for (;;) {
          if (eof()) throw LexError(start, "unterminated block comment");
          if (peek() == '*' && peek(1) == '/') {
            advance();
            advance();
            break;
          }
          advance();
        }
        continue;
      }
      break;
    }
  }

  Token make(Tok k, SrcLoc loc) {
    Token t;
    t.kind = k;
    t.loc = loc;
    return t;
  }

  Token next() {
    SrcLoc loc = here();
    if (eof()) return make(Tok::Eof, loc);
    char c = peek();

    if (isalpha((unsigned char)c) || c == '_' || c == '$') return ident(loc);
    if (isdigit((unsigned char)c)) return number(loc);
    if (c == '"' || c == '\'') return string_lit(loc);

    advance();
    switch (c) {
      case '(': return make(Tok::LParen, loc);
      case ')': return make(Tok::RParen, loc);
      case '{': return make(Tok::LBrace, loc);
      case '}': return make(Tok::RBrace, loc);
      case '[': return make(Tok::LBracket, loc);
      case ']': return make(Tok::RBracket, loc);
      case ',': return make(Tok::Comma, loc);
      case ';': return make(Tok::Semi, loc);
      case '.': return make(Tok::Dot, loc);
      case ':': return make(Tok::Colon, loc);
      case '%': return make(Tok::Percent, loc);
      case '+':
        if (peek() == '=') { advance(); return make(Tok::PlusAssign, loc); }
        return make(Tok::Plus, loc);
      case '-':
        if (peek() == '=') { advance(); return make(Tok::MinusAssign, loc); }
        return make(Tok::Minus, loc);
      case '*':
        if (peek() == '=') { advance(); return make(Tok::StarAssign, loc); }
        return make(Tok::Star, loc);
      case '/':
        if (peek() == '=') { advance(); return make(Tok::SlashAssign, loc); }
        return make(Tok::Slash, loc);
      case '=':
        if (peek() == '=') { advance(); return make(Tok::EqEq, loc); }
        return make(Tok::Assign, loc);
      case '!':
        if (peek() == '=') { advance(); return make(Tok::NotEq, loc); }
        return make(Tok::Not, loc);
      case '<':
        if (peek() == '=') { advance(); return make(Tok::Le, loc); }
        return make(Tok::Lt, loc);
      case '>':
        if (peek() == '=') { advance(); return make(Tok::Ge, loc); }
        return make(Tok::Gt, loc);
      case '&':
        if (peek() == '&') { advance(); return make(Tok::AndAnd, loc); }
        throw LexError(loc, "unexpected character '&'");
      case '|':
        if (peek() == '|') { advance(); return make(Tok::OrOr, loc); }
        throw LexError(loc, "unexpected character '|'");
      default:
        throw LexError(loc, std::string("illegal character '") + c + "'");
    }
  }

  Token ident(SrcLoc loc) {
    std::string s;
    while (!eof() && (isalnum((unsigned char)peek()) || peek() == '_' || peek() == '$'))
      s.push_back(advance());
    Token t = make(Tok::Ident, loc);
    if (s == "function") t.kind = Tok::KwFunction;
    else if (s == "var") t.kind = Tok::KwVar;
    else if (s == "if") t.kind = Tok::KwIf;
    else if (s == "else") t.kind = Tok::KwElse;
    else if (s == "while") t.kind = Tok::KwWhile;
    else if (s == "return") t.kind = Tok::KwReturn;
    else if (s == "throw") t.kind = Tok::KwThrow;
    else if (s == "new") t.kind = Tok::KwNew;
    else if (s == "null") t.kind = Tok::KwNull;
    else if (s == "true") t.kind = Tok::KwTrue;
    else if (s == "false") t.kind = Tok::KwFalse;
    else if (s == "this") t.kind = Tok::KwThis;
    else t.text = std::move(s);
    return t;
  }

  // Integer literals that fit in 32-bit signed become Int tokens, everything
  // else (fractions, exponents, oversized magnitudes) becomes Float.
  Token number(SrcLoc loc) {
    std::string s;
    bool isFloat = false;
    while (!eof() && isdigit((unsigned char)peek())) s.push_back(advance());
    if (peek() == '.' && isdigit((unsigned char)peek(1))) {
      isFloat = true;
      s.push_back(advance());
      while (!eof() && isdigit((unsigned char)peek())) s.push_back(advance());
    }
    if (peek() == 'e' || peek() == 'E') {
      isFloat = true;
      s.push_back(advance());
      if (peek() == '+' || peek() == '-') s.push_back(advance());
      if (!isdigit((unsigned char)peek())) throw LexError(here(), "malformed exponent");
      while (!eof() && isdigit((unsigned char)peek())) s.push_back(advance());
    }
    if (!isFloat) {
      errno = 0;
      long long v = strtoll(s.c_str(), nullptr, 10);
      if (errno == 0 && v >= INT32_MIN && v <= INT32_MAX) {
        Token t = make(Tok::Int, loc);
        t.ival = (int32_t)v;
        return t;
      }
    }
    Token t = make(Tok::Float, loc);
    t.fval = strtod(s.c_str(), nullptr);  // out-of-range -> HUGE_VAL (infinity)
    return t;
  }

  Token string_lit(SrcLoc loc) {
    char quote = advance();
    std::string s;
    for (;;) {
      if (eof() || peek() == '\n') throw LexError(loc, "unterminated string literal");
      char c = advance();
      if (c == quote) break;
      if (c == '\\') {
        if (eof()) throw LexError(loc, "unterminated string literal");
        char e = advance();
        switch (e) {
          case 'n': s.push_back('\n'); break;
          case 't': s.push_back('\t'); break;
          case 'r': s.push_back('\r'); break;
          case '\\': s.push_back('\\'); break;
          case '\'': s.push_back('\''); break;
          case '"': s.push_back('"'); break;
          case '0': s.push_back('\0'); break;
          default: throw LexError(here(), std::string("unknown escape '\\") + e + "'");
        }
      } else {
        s.push_back(c);
      }
    }
    Token t = make(Tok::Str, loc);
    t.text = std::move(s);
    return t;
  }
};

inline std::vector<Token> tokenize(const SourceProgram& src) {
  return Lexer(src).run();
}

}  // namespace bbvm
