#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "bbvm/unparse.hpp"
#include "helpers.hpp"

using namespace bbvm;
using namespace bbvm::test;

TEST_CASE("lexer: smallest statement") {
  auto toks = tokenize(source_from_string("return 0;"));
  REQUIRE(toks.size() == 4);  // return, 0, ;, eof
  CHECK(toks[0].kind == Tok::KwReturn);
  CHECK(toks[1].kind == Tok::Int);
  CHECK(toks[1].ival == 0);
  CHECK(toks[2].kind == Tok::Semi);
  CHECK(toks[3].kind == Tok::Eof);
}

TEST_CASE("lexer: recursive-sum token stream") {
  auto toks = tokenize(source_from_string(kRecSumFn));
  int fs = 0, ns = 0, eqeq = 0;
  for (const Token& t : toks) {
    if (t.kind == Tok::Ident && t.text == "f") ++fs;
    if (t.kind == Tok::Ident && t.text == "n") ++ns;
    if (t.kind == Tok::EqEq) ++eqeq;
  }
  CHECK(fs == 2);  // declaration + recursive call
  CHECK(ns == 4);  // parameter, ==, +, -
  CHECK(eqeq == 1);
}

TEST_CASE("lexer: oversized literal becomes an infinite float") {
  auto toks = tokenize(source_from_string("var x = 1e999;"));
  REQUIRE(toks[3].kind == Tok::Float);
  CHECK(std::isinf(toks[3].fval));
  CHECK(toks[3].fval > 0);
}

TEST_CASE("lexer: numeric literal round-trip") {
  // brute-force oracle over the numeric grammar: render a value, lex it,
  // compare the payload
  std::mt19937_64 rng(42);
  for (int i = 0; i < 500; ++i) {
    int32_t v = (int32_t)(rng() % 2000000000ull);
    auto toks = tokenize(source_from_string(std::to_string(v) + ";"));
    REQUIRE(toks[0].kind == Tok::Int);
    CHECK(toks[0].ival == v);
  }
  for (int i = 0; i < 500; ++i) {
    double d = (double)(rng() % 1000000) / 64.0 + 0.1;
    char buf[64];
    snprintf(buf, sizeof buf, "%.17g", d);
    auto toks = tokenize(source_from_string(std::string(buf) + ";"));
    REQUIRE(toks[0].kind == Tok::Float);
    CHECK(toks[0].fval == d);
  }
  // int32 boundary: 2^31-1 is an Int, 2^31 is a Float
  CHECK(tokenize(source_from_string("2147483647;"))[0].kind == Tok::Int);
  CHECK(tokenize(source_from_string("2147483648;"))[0].kind == Tok::Float);
}

TEST_CASE("lexer: errors carry positions") {
  CHECK_THROWS_AS(tokenize(source_from_string("var x = @;")), LexError);
  CHECK_THROWS_AS(tokenize(source_from_string("var s = \"abc")), LexError);
  CHECK_THROWS_AS(tokenize(source_from_string("/* never closed")), LexError);
  try {
    tokenize(source_from_string("var x =\n @;"));
    FAIL("expected LexError");
  } catch (const LexError& e) {
    CHECK(e.loc.line == 2);
  }
}

TEST_CASE("lexer: comments are skipped") {
  auto toks = tokenize(source_from_string("// one\n/* two\nthree */ 7;"));
  REQUIRE(toks[0].kind == Tok::Int);
  CHECK(toks[0].ival == 7);
}

TEST_CASE("parser: recursive-sum structure") {
  Ast ast = parse_text(kRecSumFn);
  const AstNode& root = ast.at(ast.root);
  REQUIRE(root.children.size() == 1);
  const AstNode& fn = ast.at(root.children[0]);
  REQUIRE(fn.kind == NodeKind::FunctionDecl);
  CHECK(fn.text == "f");
  CHECK(fn.ival == 1);
  const AstNode& body = ast.at(fn.children.back());
  const AstNode& ifS = ast.at(body.children[0]);
  REQUIRE(ifS.kind == NodeKind::If);
  REQUIRE(ifS.children.size() == 3);
  const AstNode& cond = ast.at(ifS.children[0]);
  REQUIRE(cond.kind == NodeKind::BinOp);
  CHECK(cond.bin == BinKind::Eq);
  CHECK(ast.at(cond.children[0]).kind == NodeKind::Ident);
  CHECK(ast.at(cond.children[0]).text == "n");
  CHECK(ast.at(cond.children[1]).kind == NodeKind::IntLit);
  CHECK(ast.at(cond.children[1]).ival == 0);
}

TEST_CASE("parser: constructor with two method-valued property writes") {
  Ast ast = parse_text(
      "function Accum() {\n"
      "    this.n = 0;\n"
      "    this.add = function id1(x) { this.n += x; };\n"
      "    this.sub = function id2(x) { this.n -= x; };\n"
      "}\n");
  const AstNode& fn = ast.at(ast.at(ast.root).children[0]);
  REQUIRE(fn.kind == NodeKind::FunctionDecl);
  CHECK(fn.text == "Accum");
  const AstNode& body = ast.at(fn.children.back());
  std::vector<std::string> fnNames;
  for (NodeId s : body.children) {
    const AstNode& es = ast.at(s);
    REQUIRE(es.kind == NodeKind::ExprStmt);
    const AstNode& pw = ast.at(es.children[0]);
    REQUIRE(pw.kind == NodeKind::PropWrite);
    if (ast.at(pw.children[1]).kind == NodeKind::FunctionExpr)
      fnNames.push_back(ast.at(pw.children[1]).text);
  }
  REQUIRE(fnNames.size() == 2);
  CHECK(fnNames[0] == "id1");
  CHECK(fnNames[1] == "id2");
  CHECK(fnNames[0] != fnNames[1]);
}

TEST_CASE("parser: malformed input") {
  CHECK_THROWS_AS(parse_text("x = ;"), ParseError);
  CHECK_THROWS_AS(parse_text("if (x"), ParseError);
  CHECK_THROWS_AS(parse_text("var = 3;"), ParseError);
  CHECK_THROWS_AS(parse_text("f(1, );"), ParseError);
}

TEST_CASE("parser: operator precedence") {
  Ast ast = parse_text("var r = 1 + 2 * 3 == 7 && true;");
  const AstNode& decl = ast.at(ast.at(ast.root).children[0]);
  const AstNode& andOp = ast.at(decl.children[0]);
  REQUIRE(andOp.kind == NodeKind::BinOp);
  CHECK(andOp.bin == BinKind::And);
  const AstNode& eq = ast.at(andOp.children[0]);
  REQUIRE(eq.bin == BinKind::Eq);
  const AstNode& add = ast.at(eq.children[0]);
  REQUIRE(add.bin == BinKind::Add);
  const AstNode& mul = ast.at(add.children[1]);
  CHECK(mul.bin == BinKind::Mul);
}

TEST_CASE("parser: compound assignment desugars to read-modify-write") {
  Ast ast = parse_text("function m() { this.n += 2; }");
  const AstNode& fn = ast.at(ast.at(ast.root).children[0]);
  const AstNode& es = ast.at(ast.at(fn.children.back()).children[0]);
  const AstNode& pw = ast.at(es.children[0]);
  REQUIRE(pw.kind == NodeKind::PropWrite);
  const AstNode& rhs = ast.at(pw.children[1]);
  REQUIRE(rhs.kind == NodeKind::BinOp);
  CHECK(rhs.bin == BinKind::Add);
  CHECK(ast.at(rhs.children[0]).kind == NodeKind::PropRead);
}

TEST_CASE("round-trip: every corpus program") {
  namespace fs = std::filesystem;
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(BBVM_CORPUS_DIR)) {
    if (entry.path().extension() != ".js") continue;
    ++seen;
    SourceProgram src = load_source(entry.path().string());
    Ast a = Parser(tokenize(src)).run();
    std::string rendered = unparse(a);
    INFO(entry.path().string());
    Ast b = Parser(tokenize(source_from_string(rendered))).run();
    CHECK(structurally_equal(a, a.root, b, b.root));
    // and unparse is a fixpoint after one round
    CHECK(unparse(b) == rendered);
  }
  CHECK(seen >= 10);
}

TEST_CASE("every node's source location is inside the file") {
  SourceProgram src = corpus_source("tree-sum.js");
  uint32_t lines = 1;
  for (char c : src.source)
    if (c == '\n') ++lines;
  Ast ast = Parser(tokenize(src)).run();
  for (const AstNode& n : ast.nodes) {
    CHECK(n.loc.line >= 1);
    CHECK(n.loc.line <= lines);
  }
}
