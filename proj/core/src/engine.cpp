#include <chrono>

#include <nlohmann/json.hpp>

#include "hybridsl/engine.hpp"

namespace hybridsl {

namespace {

constexpr std::int64_t kMaxRange = std::int64_t{1} << 24;

class Evaluator {
 public:
  explicit Evaluator(ValueAlgebra& algebra) : algebra_(algebra) {}

  std::map<std::string, Value>& env() { return env_; }

  void exec(const std::vector<Stmt>& stmts) {
    for (const Stmt& stmt : stmts) {
      if (const auto* assign = std::get_if<AssignStmt>(&stmt.node)) {
        env_[assign->target] = eval(assign->value);
      } else {
        exec_for(std::get<ForInStmt>(stmt.node));
      }
    }
  }

 private:
  [[noreturn]] static void fail(RuntimeErrorCode code, SourceLoc loc,
                                std::string message) {
    throw EvalError(code, loc, std::move(message));
  }

  // Backend errors carry no location; attach the innermost expression's.
  Value eval(const Expr& expr) {
    try {
      return eval_node(expr);
    } catch (const EvalError& e) {
      if (e.loc().line == 0) {
        throw EvalError(e.code(), expr.loc, e.message());
      }
      throw;
    }
  }

  Value eval_node(const Expr& expr) {
    return std::visit(
        [&](const auto& node) -> Value {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            return ClearInt{node.value};
          } else if constexpr (std::is_same_v<T, BoolLit>) {
            return ClearBool{node.value};
          } else if constexpr (std::is_same_v<T, VarRef>) {
            auto it = env_.find(node.name);
            if (it == env_.end()) {
              fail(RuntimeErrorCode::Capability, expr.loc,
                   "variable '" + node.name + "' is not defined");
            }
            return it->second;
          } else if constexpr (std::is_same_v<T, UnaryNeg>) {
            return algebra_.neg(eval(*node.operand));
          } else if constexpr (std::is_same_v<T, BinaryExpr>) {
            Value lhs = eval(*node.lhs);
            Value rhs = eval(*node.rhs);
            switch (node.op) {
              case BinOp::Add: return algebra_.add(lhs, rhs);
              case BinOp::Sub: return algebra_.sub(lhs, rhs);
              case BinOp::Mul: return algebra_.mul(lhs, rhs);
              case BinOp::Div: return algebra_.div(lhs, rhs);
              default: return algebra_.cmp(node.op, lhs, rhs);
            }
          } else if constexpr (std::is_same_v<T, IndexExpr>) {
            return eval_index(node);
          } else if constexpr (std::is_same_v<T, BuiltinCall>) {
            return eval_call(node, expr.loc);
          } else {
            return eval_if(node);
          }
        },
        expr.node);
  }

  Value eval_index(const IndexExpr& node) {
    Value vec = eval(*node.vector);
    Value index = eval(*node.index);
    const auto* i = std::get_if<ClearInt>(&index);
    if (!i) {
      fail(RuntimeErrorCode::Capability, node.index->loc,
           "index must be a clear integer");
    }
    std::size_t size;
    if (const auto* cv = std::get_if<ClearVec>(&vec)) {
      size = cv->values.size();
    } else if (const auto* ev = std::get_if<CipherVec>(&vec)) {
      size = ev->elements.size();
    } else {
      fail(RuntimeErrorCode::Capability, node.vector->loc,
           "cannot index a scalar");
    }
    if (i->value < 0 || static_cast<std::uint64_t>(i->value) >= size) {
      fail(RuntimeErrorCode::IndexOutOfBounds, node.index->loc,
           "index " + std::to_string(i->value) +
               " out of bounds for vector of length " + std::to_string(size));
    }
    if (const auto* cv = std::get_if<ClearVec>(&vec)) {
      return ClearInt{cv->values[static_cast<std::size_t>(i->value)]};
    }
    return std::get<CipherVec>(vec)
        .elements[static_cast<std::size_t>(i->value)];
  }

  std::size_t vector_size(const Value& v, SourceLoc loc) {
    if (const auto* cv = std::get_if<ClearVec>(&v)) return cv->values.size();
    if (const auto* ev = std::get_if<CipherVec>(&v)) {
      return ev->elements.size();
    }
    fail(RuntimeErrorCode::Capability, loc, "expected a vector");
  }

  // Validates a clear range count.
  std::int64_t range_count(const Value& v, SourceLoc loc) {
    const auto* n = std::get_if<ClearInt>(&v);
    if (!n) {
      fail(RuntimeErrorCode::Capability, loc,
           "range count must be a clear integer");
    }
    if (n->value < 0) {
      fail(RuntimeErrorCode::EmptyRangeNegative, loc,
           "range of negative count " + std::to_string(n->value));
    }
    if (n->value > kMaxRange) {
      fail(RuntimeErrorCode::Capability, loc,
           "range count " + std::to_string(n->value) + " exceeds the limit " +
               std::to_string(kMaxRange));
    }
    return n->value;
  }

  Value eval_call(const BuiltinCall& node, SourceLoc loc) {
    Value arg = eval(*node.arg);
    if (node.fn == Builtin::Len) {
      return ClearInt{
          static_cast<std::int64_t>(vector_size(arg, node.arg->loc))};
    }
    std::int64_t n = range_count(arg, loc);
    ClearVec out;
    out.values.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) out.values.push_back(i);
    return out;
  }

  Value eval_if(const IfElseExpr& node) {
    Value cond = eval(*node.cond);
    if (const auto* flag = std::get_if<ClearBool>(&cond)) {
      return flag->value ? eval(*node.then_value) : eval(*node.else_value);
    }
    if (!std::holds_alternative<CipherBool>(cond)) {
      fail(RuntimeErrorCode::Capability, node.cond->loc,
           "condition must be a boolean");
    }
    // Encrypted condition: evaluate both branches, select homomorphically.
    Value then_value = eval(*node.then_value);
    Value else_value = eval(*node.else_value);
    return algebra_.mux(cond, then_value, else_value);
  }

  void exec_for(const ForInStmt& loop) {
    std::vector<Value> elements;
    const auto* call = std::get_if<BuiltinCall>(&loop.iterable.node);
    if (call && call->fn == Builtin::Range) {
      Value arg = eval(*call->arg);
      std::int64_t n = range_count(arg, loop.iterable.loc);
      elements.reserve(static_cast<std::size_t>(n));
      for (std::int64_t i = 0; i < n; ++i) elements.push_back(ClearInt{i});
    } else {
      Value v = eval(loop.iterable);
      if (const auto* cv = std::get_if<ClearVec>(&v)) {
        elements.reserve(cv->values.size());
        for (std::int64_t x : cv->values) elements.push_back(ClearInt{x});
      } else if (const auto* ev = std::get_if<CipherVec>(&v)) {
        elements.reserve(ev->elements.size());
        for (const SimCipher& c : ev->elements) elements.push_back(c);
      } else {
        fail(RuntimeErrorCode::Capability, loop.iterable.loc,
             "cannot iterate over a scalar");
      }
    }

    std::optional<Value> saved;
    if (auto it = env_.find(loop.binder); it != env_.end()) {
      saved = it->second;
    }
    for (Value& element : elements) {
      env_[loop.binder] = std::move(element);
      exec(loop.body);
    }
    if (saved) {
      env_[loop.binder] = std::move(*saved);
    } else {
      env_.erase(loop.binder);
    }
  }

  ValueAlgebra& algebra_;
  std::map<std::string, Value> env_;
};

}  // namespace

EvalOutput evaluate(const Program& program, const Context& input,
                    ValueAlgebra& backend) {
  backend.reset_report();
  auto start = std::chrono::steady_clock::now();
  Evaluator evaluator(backend);
  for (const auto& [name, var] : input.variables) {
    evaluator.env()[name] = backend.import_var(name, var);
  }
  evaluator.exec(program.statements);
  Context output;
  bool sealed = false;
  for (const auto& [name, value] : evaluator.env()) {
    ContextVar var = backend.export_var(name, value);
    sealed = sealed || var.envelopes.has_value();
    output.variables[name] = std::move(var);
  }
  if (sealed) output.key_id = backend.key_id();
  auto stop = std::chrono::steady_clock::now();
  OpReport report = backend.report();
  report.duration =
      std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start);
  return {std::move(output), std::move(report)};
}

std::string op_report_to_json(std::string_view backend_name,
                              const OpReport& report) {
  nlohmann::ordered_json doc;
  doc["backend"] = std::string(backend_name);
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [op, count] : report.counts) counts[op] = count;
  doc["counts"] = std::move(counts);
  doc["total_cost"] = report.total_cost;
  doc["wall_ns"] = report.duration.count();
  return doc.dump() + "\n";
}

}  // namespace hybridsl
