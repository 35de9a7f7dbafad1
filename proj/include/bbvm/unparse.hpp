#pragma once

#include <charconv>
#include <cmath>
#include <string>

#include "bbvm/ast.hpp"

namespace bbvm {

// Renders an AST back to parseable source. Output is canonical (fully
// parenthesized expressions, one statement per line), not a copy of the
// original text; round-tripping is checked structurally.
class Unparser {
 public:
  explicit Unparser(const Ast& ast) : ast_(ast) {}

  std::string run() {
    for (NodeId s : ast_.at(ast_.root).children) stmt(s, 0);
    return std::move(out_);
  }

 private:
  const Ast& ast_;
  std::string out_;

  void indent(int n) { out_.append((size_t)n * 2, ' '); }

  static std::string escape(const std::string& s) {
    std::string r = "\"";
    for (char c : s) {
      switch (c) {
        case '\n': r += "\\n"; break;
        case '\t': r += "\\t"; break;
        case '\r': r += "\\r"; break;
        case '\\': r += "\\\\"; break;
        case '"': r += "\\\""; break;
        case '\0': r += "\\0"; break;
        default: r.push_back(c);
      }
    }
    r.push_back('"');
    return r;
  }

  static std::string float_text(double v) {
    if (v != v) return "(0.0 / 0.0)";  // never produced by the lexer anyway
    if (v == 1.0 / 0.0) return "1e999";
    if (v == -1.0 / 0.0) return "-1e999";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, p);
    // keep it lexically a float literal
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find('E') == std::string::npos)
      s += ".0";
    return s;
  }

  static const char* bin_text(BinKind k) {
    switch (k) {
      case BinKind::Add: return "+";
      case BinKind::Sub: return "-";
      case BinKind::Mul: return "*";
      case BinKind::Div: return "/";
      case BinKind::Mod: return "%";
      case BinKind::Eq: return "==";
      case BinKind::Ne: return "!=";
      case BinKind::Lt: return "<";
      case BinKind::Le: return "<=";
      case BinKind::Gt: return ">";
      case BinKind::Ge: return ">=";
      case BinKind::And: return "&&";
      case BinKind::Or: return "||";
    }
    return "?";
  }

  void stmt(NodeId id, int depth) {
    const AstNode& n = ast_.at(id);
    switch (n.kind) {
      case NodeKind::FunctionDecl: {
        indent(depth);
        out_ += "function " + n.text + "(";
        for (int i = 0; i < n.ival; ++i) {
          if (i) out_ += ", ";
          out_ += ast_.at(n.children[i]).text;
        }
        out_ += ") ";
        block_body(n.children.back(), depth);
        out_ += "\n";
        break;
      }
      case NodeKind::VarDecl:
        indent(depth);
        if (n.ival) out_ += "var ";
        out_ += n.text;
        if (!n.children.empty()) {
          out_ += " = ";
          expr(n.children[0]);
        }
        out_ += ";\n";
        break;
      case NodeKind::If:
        indent(depth);
        out_ += "if (";
        expr(n.children[0]);
        out_ += ")\n";
        nested_stmt(n.children[1], depth);
        if (n.children.size() > 2) {
          indent(depth);
          out_ += "else\n";
          nested_stmt(n.children[2], depth);
        }
        break;
      case NodeKind::While:
        indent(depth);
        out_ += "while (";
        expr(n.children[0]);
        out_ += ")\n";
        nested_stmt(n.children[1], depth);
        break;
      case NodeKind::Return:
        indent(depth);
        out_ += "return";
        if (!n.children.empty()) {
          out_ += " ";
          expr(n.children[0]);
        }
        out_ += ";\n";
        break;
      case NodeKind::Throw:
        indent(depth);
        out_ += "throw ";
        expr(n.children[0]);
        out_ += ";\n";
        break;
      case NodeKind::Block:
        indent(depth);
        block_body(id, depth);
        out_ += "\n";
        break;
      case NodeKind::ExprStmt: {
        indent(depth);
        const AstNode& e = ast_.at(n.children[0]);
        // Re-sugar statement-level stores produced by the parser.
        if (e.kind == NodeKind::VarDecl && e.ival == 0) {
          out_ += e.text + " = ";
          expr(e.children[0]);
        } else if (e.kind == NodeKind::PropWrite) {
          expr(e.children[0]);
          out_ += "." + e.text + " = ";
          expr(e.children[1]);
        } else if (e.kind == NodeKind::IndexWrite) {
          expr(e.children[0]);
          out_ += "[";
          expr(e.children[1]);
          out_ += "] = ";
          expr(e.children[2]);
        } else {
          expr(n.children[0]);
        }
        out_ += ";\n";
        break;
      }
      default:
        // statement-level stores reach here when not wrapped in ExprStmt
        indent(depth);
        expr(id);
        out_ += ";\n";
        break;
    }
  }

  void nested_stmt(NodeId id, int depth) { stmt(id, depth + 1); }

  void args(const AstNode& n, size_t from) {
    out_ += "(";
    for (size_t i = from; i < n.children.size(); ++i) {
      if (i > from) out_ += ", ";
      expr(n.children[i]);
    }
    out_ += ")";
  }

  void block_body(NodeId id, int depth) {
    out_ += "{\n";
    for (NodeId s : ast_.at(id).children) stmt(s, depth + 1);
    indent(depth);
    out_ += "}";
  }

  void expr(NodeId id) {
    const AstNode& n = ast_.at(id);
    switch (n.kind) {
      case NodeKind::IntLit:
        if (n.ival == INT32_MIN) {
          out_ += "(-2147483647 - 1)";
        } else if (n.ival < 0) {
          out_ += "(" + std::to_string(n.ival) + ")";
        } else {
          out_ += std::to_string(n.ival);
        }
        break;
      case NodeKind::FloatLit:
        if (n.fval < 0 || (n.fval == 0 && std::signbit(n.fval))) {
          out_ += "(" + float_text(n.fval) + ")";
        } else {
          out_ += float_text(n.fval);
        }
        break;
      case NodeKind::StrLit: out_ += escape(n.text); break;
      case NodeKind::BoolLit: out_ += n.ival ? "true" : "false"; break;
      case NodeKind::NullLit: out_ += "null"; break;
      case NodeKind::This: out_ += "this"; break;
      case NodeKind::Ident: out_ += n.text; break;
      case NodeKind::BinOp:
        out_ += "(";
        expr(n.children[0]);
        out_ += " ";
        out_ += bin_text(n.bin);
        out_ += " ";
        expr(n.children[1]);
        out_ += ")";
        break;
      case NodeKind::UnOp:
        out_ += n.un == UnKind::Neg ? "(-" : "(!";
        expr(n.children[0]);
        out_ += ")";
        break;
      case NodeKind::PropRead:
        expr(n.children[0]);
        out_ += "." + n.text;
        break;
      case NodeKind::IndexRead:
        expr(n.children[0]);
        out_ += "[";
        expr(n.children[1]);
        out_ += "]";
        break;
      case NodeKind::Call:
        expr(n.children[0]);
        args(n, 1);
        break;
      case NodeKind::MethodCall:
        expr(n.children[0]);
        out_ += "." + n.text;
        args(n, 1);
        break;
      case NodeKind::New:
        out_ += "new ";
        expr(n.children[0]);
        args(n, 1);
        break;
      case NodeKind::FunctionExpr: {
        out_ += "function";
        if (!n.text.empty()) out_ += " " + n.text;
        out_ += "(";
        for (int i = 0; i < n.ival; ++i) {
          if (i) out_ += ", ";
          out_ += ast_.at(n.children[i]).text;
        }
        out_ += ") ";
        block_body(n.children.back(), 0);
        break;
      }
      case NodeKind::ObjectLit: {
        out_ += "{ ";
        for (size_t i = 0; i < n.children.size(); ++i) {
          if (i) out_ += ", ";
          out_ += n.names[i] + ": ";
          expr(n.children[i]);
        }
        out_ += " }";
        break;
      }
      case NodeKind::ArrayLit:
        out_ += "[";
        for (size_t i = 0; i < n.children.size(); ++i) {
          if (i) out_ += ", ";
          expr(n.children[i]);
        }
        out_ += "]";
        break;
      case NodeKind::VarDecl:  // statement-level store used as expression
        out_ += n.text + " = ";
        expr(n.children[0]);
        break;
      case NodeKind::PropWrite:
        expr(n.children[0]);
        out_ += "." + n.text + " = ";
        expr(n.children[1]);
        break;
      case NodeKind::IndexWrite:
        expr(n.children[0]);
        out_ += "[";
        expr(n.children[1]);
        out_ += "] = ";
        expr(n.children[2]);
        break;
      default: out_ += "/*?*/"; break;
    }
  }
};

inline std::string unparse(const Ast& ast) { return Unparser(ast).run(); }

}  // namespace bbvm
