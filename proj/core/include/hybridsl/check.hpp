#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hybridsl/syntax.hpp"

namespace hybridsl {

/// Two-point privacy lattice. Clear is the bottom element.
enum class Label { Clear, Encrypted };

inline Label join(Label a, Label b) {
  return (a == Label::Encrypted || b == Label::Encrypted) ? Label::Encrypted
                                                          : Label::Clear;
}

std::string_view label_name(Label label);  // "clear" | "encrypted"

/// Shape of a context variable as declared at the interpreter boundary.
enum class VarKind { Scalar, Vector };

std::string_view var_kind_name(VarKind kind);  // "scalar" | "vector"

/// Shape of a value as tracked by the checker; comparisons introduce Bool.
enum class ValueKind { Int, Bool, Vec };

std::string_view value_kind_name(ValueKind kind);

struct SigVar {
  Label label = Label::Clear;
  VarKind kind = VarKind::Scalar;
  bool operator==(const SigVar&) const = default;
};

/// Declared labels and kinds of the free variables a program may read
/// before assigning.
struct Signature {
  std::map<std::string, SigVar> variables;
};

enum class ViolationCode {
  EncLoopBound,
  EncIndex,
  EncDivisor,
  EncRangeArg,
  UndefinedVar,
  KindMismatch,
};

std::string_view violation_code_name(ViolationCode code);

struct Violation {
  ViolationCode code;
  SourceLoc loc;
  std::string message;
};

/// `CODE line:col message`
std::string render_violation(const Violation& v);

struct InferredVar {
  Label label = Label::Clear;
  ValueKind kind = ValueKind::Int;
  bool operator==(const InferredVar&) const = default;
};

struct CheckResult {
  /// In source order; empty means the program is accepted.
  std::vector<Violation> violations;
  /// Final (post-program) label and kind of every variable, including
  /// signature variables and loop-assigned ones. Best effort when the
  /// program is rejected.
  std::map<std::string, InferredVar> labels;
  /// Largest number of body passes any single loop fixpoint needed. A
  /// pass either stabilizes or raises at least one label, so simple
  /// accumulator loops converge in 2; chains of copies through the loop
  /// body can need more.
  int max_loop_passes = 0;

  bool ok() const { return violations.empty(); }
};

/// Infers a privacy label for every variable by flow-sensitive fixpoint over
/// the Clear ⊑ Encrypted lattice and collects every restriction violation.
/// Checking continues past violations; the list is deterministic.
CheckResult check_program(const Program& program, const Signature& signature);

}  // namespace hybridsl
