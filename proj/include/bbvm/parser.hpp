#pragma once

#include <string>
#include <vector>

#include "bbvm/ast.hpp"
#include "bbvm/lexer.hpp"

namespace bbvm {

// Recursive-descent parser for the corpus language. Semicolons are required;
// there is no automatic semicolon insertion. Assignment is statement-level
// (expression statements and `var` initializers only). Compound assignment
// (+= -= *= /=) desugars to a read-modify-write during parsing.
class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Ast run() {
    Ast ast;
    AstNode block;
    block.kind = NodeKind::Block;
    block.loc = peek().loc;
    std::vector<NodeId> stmts;
    while (peek().kind != Tok::Eof) stmts.push_back(statement(ast));
    block.children = std::move(stmts);
    ast.root = ast.add(std::move(block));
    return ast;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  const Token& peek(size_t k = 0) const {
    size_t i = pos_ + k;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool check(Tok k) const { return peek().kind == k; }
  bool match(Tok k) {
    if (!check(k)) return false;
    advance();
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (!check(k))
      throw ParseError(peek().loc, std::string("expected ") + what + ", found " +
                                       tok_name(peek().kind));
    return advance();
  }

  NodeId node(Ast& ast, NodeKind kind, SrcLoc loc) {
    AstNode n;
    n.kind = kind;
    n.loc = loc;
    return ast.add(std::move(n));
  }

  // --- statements ---

  NodeId statement(Ast& ast) {
    switch (peek().kind) {
      case Tok::KwFunction: return function(ast, /*decl=*/true);
      case Tok::KwVar: return var_decl(ast);
      case Tok::KwIf: return if_stmt(ast);
      case Tok::KwWhile: return while_stmt(ast);
      case Tok::KwReturn: return return_stmt(ast);
      case Tok::KwThrow: return throw_stmt(ast);
      case Tok::LBrace: return block(ast);
      default: return expr_statement(ast);
    }
  }

  NodeId function(Ast& ast, bool decl) {
    SrcLoc loc = peek().loc;
    expect(Tok::KwFunction, "'function'");
    std::string name;
    if (check(Tok::Ident)) name = advance().text;
    else if (decl) throw ParseError(peek().loc, "function declaration requires a name");
    expect(Tok::LParen, "'('");
    std::vector<NodeId> params;
    if (!check(Tok::RParen)) {
      do {
        const Token& p = expect(Tok::Ident, "parameter name");
        NodeId id = node(ast, NodeKind::Ident, p.loc);
        ast.at(id).text = p.text;
        params.push_back(id);
      } while (match(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    NodeId body = block(ast);
    NodeId fn = node(ast, decl ? NodeKind::FunctionDecl : NodeKind::FunctionExpr, loc);
    ast.at(fn).text = std::move(name);
    ast.at(fn).ival = (int32_t)params.size();
    ast.at(fn).children = std::move(params);
    ast.at(fn).children.push_back(body);
    return fn;
  }

  NodeId var_decl(Ast& ast) {
    SrcLoc loc = advance().loc;  // var
    const Token& name = expect(Tok::Ident, "variable name");
    NodeId n = node(ast, NodeKind::VarDecl, loc);
    ast.at(n).text = name.text;
    ast.at(n).ival = 1;
    if (match(Tok::Assign)) {
      NodeId init = expression(ast);
      ast.at(n).children.push_back(init);
    }
    expect(Tok::Semi, "';'");
    return n;
  }

  NodeId if_stmt(Ast& ast) {
    SrcLoc loc = advance().loc;
    expect(Tok::LParen, "'('");
    NodeId cond = expression(ast);
    expect(Tok::RParen, "')'");
    NodeId thenS = statement(ast);
    NodeId n = node(ast, NodeKind::If, loc);
    ast.at(n).children = {cond, thenS};
    if (match(Tok::KwElse)) {
      NodeId elseS = statement(ast);
      ast.at(n).children.push_back(elseS);
    }
    return n;
  }

  NodeId while_stmt(Ast& ast) {
    SrcLoc loc = advance().loc;
    expect(Tok::LParen, "'('");
    NodeId cond = expression(ast);
    expect(Tok::RParen, "')'");
    NodeId body = statement(ast);
    NodeId n = node(ast, NodeKind::While, loc);
    ast.at(n).children = {cond, body};
    return n;
  }

  NodeId return_stmt(Ast& ast) {
    SrcLoc loc = advance().loc;
    NodeId n = node(ast, NodeKind::Return, loc);
    if (!check(Tok::Semi)) {
      NodeId e = expression(ast);
      ast.at(n).children.push_back(e);
    }
    expect(Tok::Semi, "';'");
    return n;
  }

  NodeId throw_stmt(Ast& ast) {
    SrcLoc loc = advance().loc;
    NodeId n = node(ast, NodeKind::Throw, loc);
    NodeId e = expression(ast);
    ast.at(n).children.push_back(e);
    expect(Tok::Semi, "';'");
    return n;
  }

  NodeId block(Ast& ast) {
    SrcLoc loc = peek().loc;
    expect(Tok::LBrace, "'{'");
    NodeId n = node(ast, NodeKind::Block, loc);
    std::vector<NodeId> stmts;
    while (!check(Tok::RBrace) && !check(Tok::Eof)) stmts.push_back(statement(ast));
    expect(Tok::RBrace, "'}'");
    ast.at(n).children = std::move(stmts);
    return n;
  }

  NodeId expr_statement(Ast& ast) {
    SrcLoc loc = peek().loc;
    NodeId e = expression(ast);
    Tok k = peek().kind;
    if (k == Tok::Assign || k == Tok::PlusAssign || k == Tok::MinusAssign ||
        k == Tok::StarAssign || k == Tok::SlashAssign) {
      advance();
      NodeId rhs = expression(ast);
      if (k != Tok::Assign) {
        BinKind op = k == Tok::PlusAssign ? BinKind::Add
                     : k == Tok::MinusAssign ? BinKind::Sub
                     : k == Tok::StarAssign ? BinKind::Mul
                                            : BinKind::Div;
        NodeId readBack = ast.clone(e);
        NodeId bin = node(ast, NodeKind::BinOp, loc);
        ast.at(bin).bin = op;
        ast.at(bin).children = {readBack, rhs};
        rhs = bin;
      }
      e = make_store(ast, loc, e, rhs);
    }
    expect(Tok::Semi, "';'");
    NodeId n = node(ast, NodeKind::ExprStmt, loc);
    ast.at(n).children = {e};
    return n;
  }

  NodeId make_store(Ast& ast, SrcLoc loc, NodeId target, NodeId value) {
    AstNode& t = ast.at(target);
    switch (t.kind) {
      case NodeKind::Ident: {
        NodeId n = node(ast, NodeKind::VarDecl, loc);
        ast.at(n).text = ast.at(target).text;
        ast.at(n).ival = 0;  // assignment, not declaration
        ast.at(n).children = {value};
        return n;
      }
      case NodeKind::PropRead: {
        NodeId n = node(ast, NodeKind::PropWrite, loc);
        ast.at(n).text = ast.at(target).text;
        ast.at(n).children = {ast.at(target).children[0], value};
        return n;
      }
      case NodeKind::IndexRead: {
        NodeId n = node(ast, NodeKind::IndexWrite, loc);
        auto kids = ast.at(target).children;
        ast.at(n).children = {kids[0], kids[1], value};
        return n;
      }
      default:
        throw ParseError(loc, "invalid assignment target");
    }
  }

  // --- expressions (precedence climbing) ---

  NodeId expression(Ast& ast) { return or_expr(ast); }

  NodeId or_expr(Ast& ast) {
    NodeId l = and_expr(ast);
    while (check(Tok::OrOr)) {
      SrcLoc loc = advance().loc;
      NodeId r = and_expr(ast);
      NodeId n = node(ast, NodeKind::BinOp, loc);
      ast.at(n).bin = BinKind::Or;
      ast.at(n).children = {l, r};
      l = n;
    }
    return l;
  }

  NodeId and_expr(Ast& ast) {
    NodeId l = equality(ast);
    while (check(Tok::AndAnd)) {
      SrcLoc loc = advance().loc;
      NodeId r = equality(ast);
      NodeId n = node(ast, NodeKind::BinOp, loc);
      ast.at(n).bin = BinKind::And;
      ast.at(n).children = {l, r};
      l = n;
    }
    return l;
  }

  NodeId equality(Ast& ast) {
    NodeId l = relational(ast);
    while (check(Tok::EqEq) || check(Tok::NotEq)) {
      BinKind op = peek().kind == Tok::EqEq ? BinKind::Eq : BinKind::Ne;
      SrcLoc loc = advance().loc;
      NodeId r = relational(ast);
      NodeId n = node(ast, NodeKind::BinOp, loc);
      ast.at(n).bin = op;
      ast.at(n).children = {l, r};
      l = n;
    }
    return l;
  }

  NodeId relational(Ast& ast) {
    NodeId l = additive(ast);
    while (check(Tok::Lt) || check(Tok::Le) || check(Tok::Gt) || check(Tok::Ge)) {
      BinKind op = peek().kind == Tok::Lt ? BinKind::Lt
                   : peek().kind == Tok::Le ? BinKind::Le
                   : peek().kind == Tok::Gt ? BinKind::Gt
                                            : BinKind::Ge;
      SrcLoc loc = advance().loc;
      NodeId r = additive(ast);
      NodeId n = node(ast, NodeKind::BinOp, loc);
      ast.at(n).bin = op;
      ast.at(n).children = {l, r};
      l = n;
    }
    return l;
  }

  NodeId additive(Ast& ast) {
    NodeId l = multiplicative(ast);
    while (check(Tok::Plus) || check(Tok::Minus)) {
      BinKind op = peek().kind == Tok::Plus ? BinKind::Add : BinKind::Sub;
      SrcLoc loc = advance().loc;
      NodeId r = multiplicative(ast);
      NodeId n = node(ast, NodeKind::BinOp, loc);
      ast.at(n).bin = op;
      ast.at(n).children = {l, r};
      l = n;
    }
    return l;
  }

  NodeId multiplicative(Ast& ast) {
    NodeId l = unary(ast);
    while (check(Tok::Star) || check(Tok::Slash) || check(Tok::Percent)) {
      BinKind op = peek().kind == Tok::Star ? BinKind::Mul
                   : peek().kind == Tok::Slash ? BinKind::Div
                                               : BinKind::Mod;
      SrcLoc loc = advance().loc;
      NodeId r = unary(ast);
      NodeId n = node(ast, NodeKind::BinOp, loc);
      ast.at(n).bin = op;
      ast.at(n).children = {l, r};
      l = n;
    }
    return l;
  }

  NodeId unary(Ast& ast) {
    if (check(Tok::Minus)) {
      SrcLoc loc = advance().loc;
      // Fold negation of numeric literals so `-5` is a literal, not an op.
      if (check(Tok::Int)) {
        const Token& t = advance();
        NodeId n = node(ast, NodeKind::IntLit, loc);
        ast.at(n).ival = -t.ival;
        return n;
      }
      if (check(Tok::Float)) {
        const Token& t = advance();
        NodeId n = node(ast, NodeKind::FloatLit, loc);
        ast.at(n).fval = -t.fval;
        return n;
      }
      NodeId e = unary(ast);
      NodeId n = node(ast, NodeKind::UnOp, loc);
      ast.at(n).un = UnKind::Neg;
      ast.at(n).children = {e};
      return n;
    }
    if (check(Tok::Not)) {
      SrcLoc loc = advance().loc;
      NodeId e = unary(ast);
      NodeId n = node(ast, NodeKind::UnOp, loc);
      ast.at(n).un = UnKind::Not;
      ast.at(n).children = {e};
      return n;
    }
    return postfix(ast);
  }

  NodeId postfix(Ast& ast) {
    NodeId e = primary(ast);
    for (;;) {
      if (check(Tok::Dot)) {
        SrcLoc loc = advance().loc;
        const Token& name = expect(Tok::Ident, "property name");
        if (check(Tok::LParen)) {
          NodeId n = node(ast, NodeKind::MethodCall, loc);
          ast.at(n).text = name.text;
          ast.at(n).children = {e};
          arguments(ast, n);
          e = n;
        } else {
          NodeId n = node(ast, NodeKind::PropRead, loc);
          ast.at(n).text = name.text;
          ast.at(n).children = {e};
          e = n;
        }
        continue;
      }
      if (check(Tok::LBracket)) {
        SrcLoc loc = advance().loc;
        NodeId idx = expression(ast);
        expect(Tok::RBracket, "']'");
        NodeId n = node(ast, NodeKind::IndexRead, loc);
        ast.at(n).children = {e, idx};
        e = n;
        continue;
      }
      if (check(Tok::LParen)) {
        SrcLoc loc = peek().loc;
        NodeId n = node(ast, NodeKind::Call, loc);
        ast.at(n).children = {e};
        arguments(ast, n);
        e = n;
        continue;
      }
      break;
    }
    return e;
  }

  void arguments(Ast& ast, NodeId call) {
    expect(Tok::LParen, "'('");
    if (!check(Tok::RParen)) {
      do {
        NodeId a = expression(ast);
        ast.at(call).children.push_back(a);
      } while (match(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
  }

  NodeId primary(Ast& ast) {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: {
        advance();
        NodeId n = node(ast, NodeKind::IntLit, t.loc);
        ast.at(n).ival = t.ival;
        return n;
      }
      case Tok::Float: {
        advance();
        NodeId n = node(ast, NodeKind::FloatLit, t.loc);
        ast.at(n).fval = t.fval;
        return n;
      }
      case Tok::Str: {
        advance();
        NodeId n = node(ast, NodeKind::StrLit, t.loc);
        ast.at(n).text = t.text;
        return n;
      }
      case Tok::KwTrue:
      case Tok::KwFalse: {
        advance();
        NodeId n = node(ast, NodeKind::BoolLit, t.loc);
        ast.at(n).ival = t.kind == Tok::KwTrue ? 1 : 0;
        return n;
      }
      case Tok::KwNull:
        advance();
        return node(ast, NodeKind::NullLit, t.loc);
      case Tok::KwThis:
        advance();
        return node(ast, NodeKind::This, t.loc);
      case Tok::Ident: {
        advance();
        NodeId n = node(ast, NodeKind::Ident, t.loc);
        ast.at(n).text = t.text;
        return n;
      }
      case Tok::LParen: {
        advance();
        NodeId e = expression(ast);
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::KwFunction:
        return function(ast, /*decl=*/false);
      case Tok::KwNew: {
        SrcLoc loc = advance().loc;
        NodeId callee = primary(ast);
        NodeId n = node(ast, NodeKind::New, loc);
        ast.at(n).children = {callee};
        arguments(ast, n);
        return n;
      }
      case Tok::LBrace: {
        SrcLoc loc = advance().loc;
        NodeId n = node(ast, NodeKind::ObjectLit, loc);
        if (!check(Tok::RBrace)) {
          do {
            std::string key;
            if (check(Tok::Ident)) key = advance().text;
            else if (check(Tok::Str)) key = advance().text;
            else throw ParseError(peek().loc, "expected property name");
            expect(Tok::Colon, "':'");
            NodeId val = expression(ast);
            ast.at(n).names.push_back(std::move(key));
            ast.at(n).children.push_back(val);
          } while (match(Tok::Comma));
        }
        expect(Tok::RBrace, "'}'");
        return n;
      }
      case Tok::LBracket: {
        SrcLoc loc = advance().loc;
        NodeId n = node(ast, NodeKind::ArrayLit, loc);
        if (!check(Tok::RBracket)) {
          do {
            NodeId e = expression(ast);
            ast.at(n).children.push_back(e);
          } while (match(Tok::Comma));
        }
        expect(Tok::RBracket, "']'");
        return n;
      }
      default:
        throw ParseError(t.loc, std::string("expected expression, found ") +
                                    tok_name(t.kind));
    }
  }
};

}  // namespace bbvm
