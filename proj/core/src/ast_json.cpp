#include <nlohmann/json.hpp>

#include "hybridsl/syntax.hpp"

namespace hybridsl {
namespace {

using json = nlohmann::ordered_json;

json expr_to_json(const Expr& e) {
  json j;
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          j["expr"] = "int";
          j["value"] = node.value;
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          j["expr"] = "bool";
          j["value"] = node.value;
        } else if constexpr (std::is_same_v<T, VarRef>) {
          j["expr"] = "var";
          j["name"] = node.name;
        } else if constexpr (std::is_same_v<T, UnaryNeg>) {
          j["expr"] = "neg";
          j["operand"] = expr_to_json(*node.operand);
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          j["expr"] = "binary";
          j["op"] = std::string(bin_op_symbol(node.op));
          j["lhs"] = expr_to_json(*node.lhs);
          j["rhs"] = expr_to_json(*node.rhs);
        } else if constexpr (std::is_same_v<T, IndexExpr>) {
          j["expr"] = "index";
          j["vector"] = expr_to_json(*node.vector);
          j["index"] = expr_to_json(*node.index);
        } else if constexpr (std::is_same_v<T, BuiltinCall>) {
          j["expr"] = "call";
          j["fn"] = node.fn == Builtin::Len ? "len" : "range";
          j["arg"] = expr_to_json(*node.arg);
        } else if constexpr (std::is_same_v<T, IfElseExpr>) {
          j["expr"] = "if";
          j["cond"] = expr_to_json(*node.cond);
          j["then"] = expr_to_json(*node.then_value);
          j["else"] = expr_to_json(*node.else_value);
        }
      },
      e.node);
  j["line"] = e.loc.line;
  j["col"] = e.loc.col;
  return j;
}

json stmt_to_json(const Stmt& stmt) {
  json j;
  if (auto* assign = std::get_if<AssignStmt>(&stmt.node)) {
    j["stmt"] = "assign";
    j["target"] = assign->target;
    j["value"] = expr_to_json(assign->value);
  } else {
    const auto& loop = std::get<ForInStmt>(stmt.node);
    j["stmt"] = "for";
    j["binder"] = loop.binder;
    j["iterable"] = expr_to_json(loop.iterable);
    json body = json::array();
    for (const Stmt& s : loop.body) body.push_back(stmt_to_json(s));
    j["body"] = std::move(body);
  }
  j["line"] = stmt.loc.line;
  j["col"] = stmt.loc.col;
  return j;
}

[[noreturn]] void bad(const std::string& what) {
  throw std::invalid_argument("invalid AST document: " + what);
}

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) bad(std::string("missing field '") + name + "'");
  return *it;
}

std::string str_field(const json& j, const char* name) {
  const json& f = field(j, name);
  if (!f.is_string()) bad(std::string("field '") + name + "' must be a string");
  return f.get<std::string>();
}

SourceLoc loc_of(const json& j) {
  SourceLoc loc;
  if (j.contains("line") && j["line"].is_number_integer()) {
    loc.line = j["line"].get<int>();
  }
  if (j.contains("col") && j["col"].is_number_integer()) {
    loc.col = j["col"].get<int>();
  }
  return loc;
}

BinOp op_from_symbol(const std::string& s) {
  if (s == "+") return BinOp::Add;
  if (s == "-") return BinOp::Sub;
  if (s == "*") return BinOp::Mul;
  if (s == "/") return BinOp::Div;
  if (s == "==") return BinOp::Eq;
  if (s == "!=") return BinOp::Ne;
  if (s == "<") return BinOp::Lt;
  if (s == "<=") return BinOp::Le;
  if (s == ">") return BinOp::Gt;
  if (s == ">=") return BinOp::Ge;
  bad("unknown operator '" + s + "'");
}

Expr expr_from_json(const json& j) {
  if (!j.is_object()) bad("expression must be an object");
  std::string kind = str_field(j, "expr");
  Expr e;
  e.loc = loc_of(j);
  auto box = [](Expr inner) { return std::make_unique<Expr>(std::move(inner)); };
  if (kind == "int") {
    const json& v = field(j, "value");
    if (!v.is_number_integer()) bad("int value must be an integer");
    e.node = IntLit{v.get<std::int64_t>()};
  } else if (kind == "bool") {
    const json& v = field(j, "value");
    if (!v.is_boolean()) bad("bool value must be a boolean");
    e.node = BoolLit{v.get<bool>()};
  } else if (kind == "var") {
    e.node = VarRef{str_field(j, "name")};
  } else if (kind == "neg") {
    e.node = UnaryNeg{box(expr_from_json(field(j, "operand")))};
  } else if (kind == "binary") {
    e.node = BinaryExpr{op_from_symbol(str_field(j, "op")),
                        box(expr_from_json(field(j, "lhs"))),
                        box(expr_from_json(field(j, "rhs")))};
  } else if (kind == "index") {
    e.node = IndexExpr{box(expr_from_json(field(j, "vector"))),
                       box(expr_from_json(field(j, "index")))};
  } else if (kind == "call") {
    std::string fn = str_field(j, "fn");
    if (fn != "len" && fn != "range") bad("unknown builtin '" + fn + "'");
    e.node = BuiltinCall{fn == "len" ? Builtin::Len : Builtin::Range,
                         box(expr_from_json(field(j, "arg")))};
  } else if (kind == "if") {
    e.node = IfElseExpr{box(expr_from_json(field(j, "cond"))),
                        box(expr_from_json(field(j, "then"))),
                        box(expr_from_json(field(j, "else")))};
  } else {
    bad("unknown expression kind '" + kind + "'");
  }
  return e;
}

Stmt stmt_from_json(const json& j) {
  if (!j.is_object()) bad("statement must be an object");
  std::string kind = str_field(j, "stmt");
  Stmt stmt;
  stmt.loc = loc_of(j);
  if (kind == "assign") {
    stmt.node = AssignStmt{str_field(j, "target"),
                           expr_from_json(field(j, "value"))};
  } else if (kind == "for") {
    const json& body = field(j, "body");
    if (!body.is_array() || body.empty()) {
      bad("for body must be a non-empty array");
    }
    std::vector<Stmt> stmts;
    for (const json& s : body) stmts.push_back(stmt_from_json(s));
    stmt.node = ForInStmt{str_field(j, "binder"),
                          expr_from_json(field(j, "iterable")),
                          std::move(stmts)};
  } else {
    bad("unknown statement kind '" + kind + "'");
  }
  return stmt;
}

void expr_to_text(std::string& out, const Expr& e, int indent) {
  out.append(static_cast<std::size_t>(indent), ' ');
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          out += "int " + std::to_string(node.value) + "\n";
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          out += node.value ? "bool true\n" : "bool false\n";
        } else if constexpr (std::is_same_v<T, VarRef>) {
          out += "var " + node.name + "\n";
        } else if constexpr (std::is_same_v<T, UnaryNeg>) {
          out += "neg\n";
          expr_to_text(out, *node.operand, indent + 2);
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          out += "binary " + std::string(bin_op_symbol(node.op)) + "\n";
          expr_to_text(out, *node.lhs, indent + 2);
          expr_to_text(out, *node.rhs, indent + 2);
        } else if constexpr (std::is_same_v<T, IndexExpr>) {
          out += "index\n";
          expr_to_text(out, *node.vector, indent + 2);
          expr_to_text(out, *node.index, indent + 2);
        } else if constexpr (std::is_same_v<T, BuiltinCall>) {
          out += node.fn == Builtin::Len ? "call len\n" : "call range\n";
          expr_to_text(out, *node.arg, indent + 2);
        } else if constexpr (std::is_same_v<T, IfElseExpr>) {
          out += "if\n";
          expr_to_text(out, *node.cond, indent + 2);
          expr_to_text(out, *node.then_value, indent + 2);
          expr_to_text(out, *node.else_value, indent + 2);
        }
      },
      e.node);
}

void stmt_to_text(std::string& out, const Stmt& stmt, int indent) {
  out.append(static_cast<std::size_t>(indent), ' ');
  if (auto* assign = std::get_if<AssignStmt>(&stmt.node)) {
    out += "assign " + assign->target + "\n";
    expr_to_text(out, assign->value, indent + 2);
  } else {
    const auto& loop = std::get<ForInStmt>(stmt.node);
    out += "for " + loop.binder + "\n";
    expr_to_text(out, loop.iterable, indent + 2);
    for (const Stmt& s : loop.body) stmt_to_text(out, s, indent + 2);
  }
}

}  // namespace

std::string ast_to_json(const Program& program) {
  json j;
  json stmts = json::array();
  for (const Stmt& s : program.statements) stmts.push_back(stmt_to_json(s));
  j["statements"] = std::move(stmts);
  return j.dump(2) + "\n";
}

Program ast_from_json(std::string_view json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) bad("not valid JSON");
  if (!j.is_object()) bad("top level must be an object");
  const json& stmts = field(j, "statements");
  if (!stmts.is_array()) bad("'statements' must be an array");
  Program program;
  for (const json& s : stmts) program.statements.push_back(stmt_from_json(s));
  return program;
}

std::string ast_to_text(const Program& program) {
  std::string out;
  for (const Stmt& s : program.statements) stmt_to_text(out, s, 0);
  return out;
}

}  // namespace hybridsl
