#pragma once

#include <string>
#include <vector>

#include "bbvm/common.hpp"

namespace bbvm {

enum class NodeKind : uint8_t {
  FunctionDecl, FunctionExpr, VarDecl, If, While, Return, Throw, ExprStmt,
  Block, Call, MethodCall, New, BinOp, UnOp, PropRead, PropWrite, Ident,
  IntLit, FloatLit, StrLit, BoolLit, NullLit, ObjectLit, ArrayLit,
  IndexRead, IndexWrite, This,
};

enum class BinKind : uint8_t { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnKind : uint8_t { Neg, Not };

using NodeId = uint32_t;
inline constexpr NodeId kNoNode = 0xffffffff;

// Arena node. Payload fields are used per kind:
//   FunctionDecl/FunctionExpr: text=name (may be empty for anonymous
//     expressions), ival=param count; children = params..., body block
//   VarDecl: text=name, ival=1 when a `var` declaration, 0 for plain
//     assignment to an already-bound name; children = [init] (optional
//     for declarations)
//   BinOp: bin; UnOp: un
//   PropRead: text=prop, children=[obj]
//   PropWrite: text=prop, children=[obj, value]
//   MethodCall: text=method, children=[obj, args...]
//   ObjectLit: names[i] pairs with children[i]
//   Ident/StrLit: text; IntLit: ival; FloatLit: fval; BoolLit: ival(0/1)
struct AstNode {
  NodeKind kind;
  SrcLoc loc;
  std::vector<NodeId> children;
  std::string text;
  std::vector<std::string> names;  // ObjectLit property names
  int32_t ival = 0;
  double fval = 0.0;
  BinKind bin = BinKind::Add;
  UnKind un = UnKind::Neg;
};

struct Ast {
  std::vector<AstNode> nodes;
  NodeId root = kNoNode;  // a Block of top-level statements

  const AstNode& at(NodeId id) const { return nodes[id]; }
  AstNode& at(NodeId id) { return nodes[id]; }

  NodeId add(AstNode n) {
    nodes.push_back(std::move(n));
    return (NodeId)(nodes.size() - 1);
  }

  // Structural copy of a subtree; used when desugaring compound assignment.
  NodeId clone(NodeId id) {
    AstNode copy = nodes[id];
    for (auto& c : copy.children) c = clone(c);
    return add(std::move(copy));
  }
};

inline bool structurally_equal(const Ast& a, NodeId ia, const Ast& b, NodeId ib) {
  const AstNode& x = a.at(ia);
  const AstNode& y = b.at(ib);
  if (x.kind != y.kind || x.text != y.text || x.names != y.names ||
      x.ival != y.ival || x.bin != y.bin || x.un != y.un ||
      x.children.size() != y.children.size())
    return false;
  if (x.kind == NodeKind::FloatLit && !(x.fval == y.fval)) return false;
  for (size_t i = 0; i < x.children.size(); ++i)
    if (!structurally_equal(a, x.children[i], b, y.children[i])) return false;
  return true;
}

}  // namespace bbvm
