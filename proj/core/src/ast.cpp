#include "hybridsl/syntax.hpp"

namespace hybridsl {

std::string_view bin_op_symbol(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
  }
  return "?";
}

bool is_comparison(BinOp op) {
  switch (op) {
    case BinOp::Eq:
    case BinOp::Ne:
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge:
      return true;
    default:
      return false;
  }
}

namespace {

bool equal(const Expr& a, const Expr& b);

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return a == b;
  return equal(*a, *b);
}

struct ExprEq {
  const Expr& other;

  bool operator()(const IntLit& n) const {
    auto* o = std::get_if<IntLit>(&other.node);
    return o && o->value == n.value;
  }
  bool operator()(const BoolLit& n) const {
    auto* o = std::get_if<BoolLit>(&other.node);
    return o && o->value == n.value;
  }
  bool operator()(const VarRef& n) const {
    auto* o = std::get_if<VarRef>(&other.node);
    return o && o->name == n.name;
  }
  bool operator()(const UnaryNeg& n) const {
    auto* o = std::get_if<UnaryNeg>(&other.node);
    return o && equal(n.operand, o->operand);
  }
  bool operator()(const BinaryExpr& n) const {
    auto* o = std::get_if<BinaryExpr>(&other.node);
    return o && o->op == n.op && equal(n.lhs, o->lhs) && equal(n.rhs, o->rhs);
  }
  bool operator()(const IndexExpr& n) const {
    auto* o = std::get_if<IndexExpr>(&other.node);
    return o && equal(n.vector, o->vector) && equal(n.index, o->index);
  }
  bool operator()(const BuiltinCall& n) const {
    auto* o = std::get_if<BuiltinCall>(&other.node);
    return o && o->fn == n.fn && equal(n.arg, o->arg);
  }
  bool operator()(const IfElseExpr& n) const {
    auto* o = std::get_if<IfElseExpr>(&other.node);
    return o && equal(n.cond, o->cond) && equal(n.then_value, o->then_value) &&
           equal(n.else_value, o->else_value);
  }
};

bool equal(const Expr& a, const Expr& b) {
  return std::visit(ExprEq{b}, a.node);
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) { return equal(a, b); }

bool operator==(const Stmt& a, const Stmt& b) {
  if (auto* x = std::get_if<AssignStmt>(&a.node)) {
    auto* y = std::get_if<AssignStmt>(&b.node);
    return y && x->target == y->target && x->value == y->value;
  }
  auto* x = std::get_if<ForInStmt>(&a.node);
  auto* y = std::get_if<ForInStmt>(&b.node);
  if (!x || !y) return false;
  if (x->binder != y->binder || !(x->iterable == y->iterable)) return false;
  if (x->body.size() != y->body.size()) return false;
  for (std::size_t i = 0; i < x->body.size(); ++i) {
    if (!(x->body[i] == y->body[i])) return false;
  }
  return true;
}

bool operator==(const Program& a, const Program& b) {
  if (a.statements.size() != b.statements.size()) return false;
  for (std::size_t i = 0; i < a.statements.size(); ++i) {
    if (!(a.statements[i] == b.statements[i])) return false;
  }
  return true;
}

}  // namespace hybridsl
