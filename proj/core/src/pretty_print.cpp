#include <string>

#include "hybridsl/syntax.hpp"

namespace hybridsl {
namespace {

// Larger binds tighter. Atoms (literals, variables, calls, if-else) are
// self-delimiting.
constexpr int kPrecCmp = 1;
constexpr int kPrecAdd = 2;
constexpr int kPrecMul = 3;
constexpr int kPrecUnary = 4;
constexpr int kPrecPostfix = 5;
constexpr int kPrecAtom = 6;

int op_prec(BinOp op) {
  switch (op) {
    case BinOp::Add:
    case BinOp::Sub:
      return kPrecAdd;
    case BinOp::Mul:
    case BinOp::Div:
      return kPrecMul;
    default:
      return kPrecCmp;
  }
}

int prec(const Expr& e) {
  return std::visit(
      [](const auto& node) -> int {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, BinaryExpr>) {
          return op_prec(node.op);
        } else if constexpr (std::is_same_v<T, UnaryNeg>) {
          return kPrecUnary;
        } else if constexpr (std::is_same_v<T, IndexExpr>) {
          return kPrecPostfix;
        } else {
          return kPrecAtom;
        }
      },
      e.node);
}

void print_expr(std::string& out, const Expr& e);

// Parenthesize when the child binds looser than the context, or on a tie
// that the grammar would re-associate (right operands; non-associative
// comparison operands).
void print_child(std::string& out, const Expr& child, int min_prec,
                 bool tie_ok) {
  int p = prec(child);
  bool parens = p < min_prec || (p == min_prec && !tie_ok);
  if (parens) out += '(';
  print_expr(out, child);
  if (parens) out += ')';
}

void print_expr(std::string& out, const Expr& e) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          out += std::to_string(node.value);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          out += node.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, VarRef>) {
          out += node.name;
        } else if constexpr (std::is_same_v<T, UnaryNeg>) {
          out += '-';
          print_child(out, *node.operand, kPrecUnary, true);
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          int p = op_prec(node.op);
          bool assoc = !is_comparison(node.op);
          print_child(out, *node.lhs, p, assoc);
          out += ' ';
          out += bin_op_symbol(node.op);
          out += ' ';
          print_child(out, *node.rhs, p, false);
        } else if constexpr (std::is_same_v<T, IndexExpr>) {
          print_child(out, *node.vector, kPrecPostfix, true);
          out += '[';
          print_expr(out, *node.index);
          out += ']';
        } else if constexpr (std::is_same_v<T, BuiltinCall>) {
          out += node.fn == Builtin::Len ? "len(" : "range(";
          print_expr(out, *node.arg);
          out += ')';
        } else if constexpr (std::is_same_v<T, IfElseExpr>) {
          out += "if ";
          print_expr(out, *node.cond);
          out += " { ";
          print_expr(out, *node.then_value);
          out += " } else { ";
          print_expr(out, *node.else_value);
          out += " }";
        }
      },
      e.node);
}

void print_stmt(std::string& out, const Stmt& stmt, int indent) {
  out.append(static_cast<std::size_t>(indent), ' ');
  if (auto* assign = std::get_if<AssignStmt>(&stmt.node)) {
    out += assign->target;
    out += " = ";
    print_expr(out, assign->value);
    out += '\n';
    return;
  }
  const auto& loop = std::get<ForInStmt>(stmt.node);
  out += "for ";
  out += loop.binder;
  out += " in ";
  print_expr(out, loop.iterable);
  out += " {\n";
  for (const Stmt& s : loop.body) print_stmt(out, s, indent + 2);
  out.append(static_cast<std::size_t>(indent), ' ');
  out += "}\n";
}

}  // namespace

std::string pretty_print(const Program& program) {
  std::string out;
  for (const Stmt& stmt : program.statements) print_stmt(out, stmt, 0);
  return out;
}

std::string pretty_print(const Expr& expr) {
  std::string out;
  print_expr(out, expr);
  return out;
}

}  // namespace hybridsl
