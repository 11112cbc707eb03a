#include <algorithm>
#include <optional>
#include <set>

#include "hybridsl/check.hpp"

namespace hybridsl {

std::string_view label_name(Label label) {
  return label == Label::Clear ? "clear" : "encrypted";
}

std::string_view var_kind_name(VarKind kind) {
  return kind == VarKind::Scalar ? "scalar" : "vector";
}

std::string_view value_kind_name(ValueKind kind) {
  switch (kind) {
    case ValueKind::Int: return "int";
    case ValueKind::Bool: return "bool";
    case ValueKind::Vec: return "vector";
  }
  return "?";
}

std::string_view violation_code_name(ViolationCode code) {
  switch (code) {
    case ViolationCode::EncLoopBound: return "ENC_LOOP_BOUND";
    case ViolationCode::EncIndex: return "ENC_INDEX";
    case ViolationCode::EncDivisor: return "ENC_DIVISOR";
    case ViolationCode::EncRangeArg: return "ENC_RANGE_ARG";
    case ViolationCode::UndefinedVar: return "UNDEFINED_VAR";
    case ViolationCode::KindMismatch: return "KIND_MISMATCH";
  }
  return "?";
}

std::string render_violation(const Violation& v) {
  std::string out(violation_code_name(v.code));
  out += ' ';
  out += std::to_string(v.loc.line);
  out += ':';
  out += std::to_string(v.loc.col);
  out += ' ';
  out += v.message;
  return out;
}

namespace {

struct Env {
  std::map<std::string, InferredVar> labels;
  std::set<std::string> defined;
};

class Checker {
 public:
  explicit Checker(const Signature& signature) {
    for (const auto& [name, var] : signature.variables) {
      env_.labels[name] = {var.label, var.kind == VarKind::Scalar
                                          ? ValueKind::Int
                                          : ValueKind::Vec};
      env_.defined.insert(name);
    }
  }

  CheckResult run(const Program& program) {
    walk(program.statements, env_, /*collect=*/true);
    std::stable_sort(out_.begin(), out_.end(),
                     [](const Violation& a, const Violation& b) {
                       if (a.loc.line != b.loc.line) {
                         return a.loc.line < b.loc.line;
                       }
                       return a.loc.col < b.loc.col;
                     });
    CheckResult result;
    result.violations = std::move(out_);
    result.labels = std::move(env_.labels);
    result.max_loop_passes = max_passes_;
    return result;
  }

 private:
  void violation(bool collect, ViolationCode code, SourceLoc loc,
                 std::string message) {
    if (collect) out_.push_back({code, loc, std::move(message)});
  }

  // Per-variable lattice join of two environments. Kind conflicts are
  // reported (when collecting) and resolved in favor of `a`.
  Env join_env(const Env& a, const Env& b, bool collect, SourceLoc loc) {
    Env out = a;
    for (const auto& [name, var] : b.labels) {
      auto it = out.labels.find(name);
      if (it == out.labels.end()) {
        out.labels[name] = var;
        continue;
      }
      if (it->second.kind != var.kind) {
        violation(collect, ViolationCode::KindMismatch, loc,
                  "variable '" + name + "' changes kind across loop iterations");
      }
      it->second.label = join(it->second.label, var.label);
    }
    return out;
  }

  void walk(const std::vector<Stmt>& stmts, Env& env, bool collect) {
    for (const Stmt& stmt : stmts) {
      if (auto* assign = std::get_if<AssignStmt>(&stmt.node)) {
        InferredVar value = eval(assign->value, env, collect);
        env.labels[assign->target] = value;
        env.defined.insert(assign->target);
        continue;
      }
      walk_for(std::get<ForInStmt>(stmt.node), stmt.loc, env, collect);
    }
  }

  void walk_for(const ForInStmt& loop, SourceLoc loc, Env& env, bool collect) {
    // A `range` call in the loop header is the loop bound itself.
    InferredVar iter;
    const auto* call = std::get_if<BuiltinCall>(&loop.iterable.node);
    if (call && call->fn == Builtin::Range) {
      InferredVar arg = eval(*call->arg, env, collect);
      if (arg.kind != ValueKind::Int) {
        violation(collect, ViolationCode::KindMismatch, call->arg->loc,
                  "range argument must be a scalar integer");
      } else if (arg.label == Label::Encrypted) {
        violation(collect, ViolationCode::EncLoopBound, loop.iterable.loc,
                  "loop bound must be clear");
      }
      iter = {Label::Clear, ValueKind::Vec};
    } else {
      iter = eval(loop.iterable, env, collect);
      if (iter.kind != ValueKind::Vec) {
        violation(collect, ViolationCode::KindMismatch, loop.iterable.loc,
                  "loop iterable must be a vector, not " +
                      std::string(value_kind_name(iter.kind)));
      }
    }

    const std::set<std::string> pre_defined = env.defined;
    const auto saved_binder = [&]() -> std::optional<InferredVar> {
      auto it = env.labels.find(loop.binder);
      if (it == env.labels.end()) return std::nullopt;
      return it->second;
    }();

    // Loop-entry environment: stable join over all iterations. Iteration 1
    // enters with the pre-loop state, so definedness inside the body uses
    // the pre-loop set (plus the binder) throughout.
    Env entry = env;
    entry.labels[loop.binder] = {iter.label, ValueKind::Int};
    entry.defined.insert(loop.binder);

    int passes = 0;
    for (;;) {
      Env body = entry;
      walk(loop.body, body, /*collect=*/false);
      ++passes;
      Env joined = join_env(entry, body, /*collect=*/false, loc);
      joined.defined = entry.defined;
      if (joined.labels == entry.labels) break;
      entry = std::move(joined);
      if (passes > 10000) break;  // unreachable; defends against a bug
    }
    max_passes_ = std::max(max_passes_, passes);

    if (collect) {
      Env body = entry;
      walk(loop.body, body, /*collect=*/true);
      // Re-derive the merge only to surface kind conflicts in the report.
      join_env(entry, body, /*collect=*/true, loc);
    }

    env.labels = std::move(entry.labels);
    if (saved_binder) {
      env.labels[loop.binder] = *saved_binder;
    } else {
      env.labels.erase(loop.binder);
    }
    // The loop may run zero times, so only pre-loop definitions survive.
    env.defined = pre_defined;
  }

  InferredVar eval(const Expr& expr, Env& env, bool collect) {
    return std::visit(
        [&](const auto& node) -> InferredVar {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            return {Label::Clear, ValueKind::Int};
          } else if constexpr (std::is_same_v<T, BoolLit>) {
            return {Label::Clear, ValueKind::Bool};
          } else if constexpr (std::is_same_v<T, VarRef>) {
            return eval_var(node, expr.loc, env, collect);
          } else if constexpr (std::is_same_v<T, UnaryNeg>) {
            InferredVar v = eval(*node.operand, env, collect);
            if (v.kind != ValueKind::Int) {
              violation(collect, ViolationCode::KindMismatch, expr.loc,
                        "negation requires a scalar integer");
            }
            return {v.label, ValueKind::Int};
          } else if constexpr (std::is_same_v<T, BinaryExpr>) {
            return eval_binary(node, expr.loc, env, collect);
          } else if constexpr (std::is_same_v<T, IndexExpr>) {
            return eval_index(node, env, collect);
          } else if constexpr (std::is_same_v<T, BuiltinCall>) {
            return eval_call(node, env, collect);
          } else {
            return eval_if(node, env, collect);
          }
        },
        expr.node);
  }

  InferredVar eval_var(const VarRef& var, SourceLoc loc, Env& env,
                       bool collect) {
    if (!env.defined.count(var.name)) {
      if (collect && reported_undefined_.insert(var.name).second) {
        violation(collect, ViolationCode::UndefinedVar, loc,
                  "variable '" + var.name + "' read before assignment");
      }
      auto it = env.labels.find(var.name);
      if (it != env.labels.end()) return it->second;
      return {Label::Clear, ValueKind::Int};
    }
    return env.labels.at(var.name);
  }

  InferredVar eval_binary(const BinaryExpr& bin, SourceLoc loc, Env& env,
                          bool collect) {
    InferredVar lhs = eval(*bin.lhs, env, collect);
    InferredVar rhs = eval(*bin.rhs, env, collect);
    bool scalar = lhs.kind == ValueKind::Int && rhs.kind == ValueKind::Int;
    if (!scalar) {
      violation(collect, ViolationCode::KindMismatch, loc,
                is_comparison(bin.op) ? "comparison requires scalar integers"
                                      : "arithmetic requires scalar integers");
    }
    if (bin.op == BinOp::Div && scalar && rhs.label == Label::Encrypted) {
      violation(collect, ViolationCode::EncDivisor, bin.rhs->loc,
                "divisor must be clear");
    }
    Label out = join(lhs.label, rhs.label);
    return {out, is_comparison(bin.op) ? ValueKind::Bool : ValueKind::Int};
  }

  InferredVar eval_index(const IndexExpr& idx, Env& env, bool collect) {
    InferredVar vec = eval(*idx.vector, env, collect);
    InferredVar index = eval(*idx.index, env, collect);
    if (vec.kind != ValueKind::Vec) {
      violation(collect, ViolationCode::KindMismatch, idx.vector->loc,
                "only vectors can be indexed, not " +
                    std::string(value_kind_name(vec.kind)));
    }
    if (index.kind != ValueKind::Int) {
      violation(collect, ViolationCode::KindMismatch, idx.index->loc,
                "index must be a scalar integer");
    } else if (index.label == Label::Encrypted) {
      violation(collect, ViolationCode::EncIndex, idx.index->loc,
                "index must be clear");
    }
    return {vec.label, ValueKind::Int};
  }

  InferredVar eval_call(const BuiltinCall& call, Env& env, bool collect) {
    InferredVar arg = eval(*call.arg, env, collect);
    if (call.fn == Builtin::Len) {
      if (arg.kind != ValueKind::Vec) {
        violation(collect, ViolationCode::KindMismatch, call.arg->loc,
                  "len requires a vector");
      }
      // Vector sizes are public metadata: len is Clear even when the
      // vector is encrypted.
      return {Label::Clear, ValueKind::Int};
    }
    if (arg.kind != ValueKind::Int) {
      violation(collect, ViolationCode::KindMismatch, call.arg->loc,
                "range argument must be a scalar integer");
    } else if (arg.label == Label::Encrypted) {
      violation(collect, ViolationCode::EncRangeArg, call.arg->loc,
                "range argument must be clear");
    }
    return {Label::Clear, ValueKind::Vec};
  }

  InferredVar eval_if(const IfElseExpr& ife, Env& env, bool collect) {
    InferredVar cond = eval(*ife.cond, env, collect);
    if (cond.kind != ValueKind::Bool) {
      violation(collect, ViolationCode::KindMismatch, ife.cond->loc,
                "if condition must be a boolean");
    }
    InferredVar then_value = eval(*ife.then_value, env, collect);
    InferredVar else_value = eval(*ife.else_value, env, collect);
    if (then_value.kind != else_value.kind) {
      violation(collect, ViolationCode::KindMismatch, ife.then_value->loc,
                "if branches must have the same kind");
    }
    if (cond.label == Label::Encrypted) {
      // Lowered to a multiplexer: both branches evaluate homomorphically,
      // which rules out whole-vector selection.
      if (then_value.kind == ValueKind::Vec ||
          else_value.kind == ValueKind::Vec) {
        violation(collect, ViolationCode::KindMismatch, ife.then_value->loc,
                  "encrypted selection over vectors is not supported");
      }
      return {Label::Encrypted, then_value.kind};
    }
    return {join(then_value.label, else_value.label), then_value.kind};
  }

  Env env_;
  std::vector<Violation> out_;
  std::set<std::string> reported_undefined_;
  int max_passes_ = 0;
};

}  // namespace

CheckResult check_program(const Program& program, const Signature& signature) {
  Checker checker(signature);
  return checker.run(program);
}

}  // namespace hybridsl
