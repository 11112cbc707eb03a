#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hybridsl {

/// 1-based position of a token or AST node in the source text. {0, 0} means
/// "unknown" (e.g. synthesized nodes).
struct SourceLoc {
  int line = 0;
  int col = 0;
};

inline bool operator==(SourceLoc a, SourceLoc b) {
  return a.line == b.line && a.col == b.col;
}

enum class TokenKind { Identifier, Integer, Keyword, Operator, Punct };

struct Token {
  TokenKind kind;
  std::string text;
  SourceLoc loc;  // position of the first character
};

/// Reserved words: for, in, if, else, true, false, len, range.
bool is_keyword(std::string_view word);

/// [a-zA-Z_][a-zA-Z0-9_]* and not a keyword.
bool is_identifier(std::string_view word);

class LexError : public std::runtime_error {
 public:
  LexError(SourceLoc loc, char offending);

  SourceLoc loc() const { return loc_; }
  char offending() const { return offending_; }

 private:
  SourceLoc loc_;
  char offending_;
};

/// Splits source text into tokens. Whitespace separates tokens; `#` starts a
/// comment running to end of line. Throws LexError on any character outside
/// the accepted alphabet.
std::vector<Token> tokenize(std::string_view source);

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

enum class BinOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge };

std::string_view bin_op_symbol(BinOp op);
bool is_comparison(BinOp op);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct IntLit {
  std::int64_t value = 0;
};

struct BoolLit {
  bool value = false;
};

struct VarRef {
  std::string name;
};

struct UnaryNeg {
  ExprPtr operand;
};

struct BinaryExpr {
  BinOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct IndexExpr {
  ExprPtr vector;
  ExprPtr index;
};

enum class Builtin { Len, Range };

struct BuiltinCall {
  Builtin fn;
  ExprPtr arg;
};

/// `if c { a } else { b }` — an expression; both branches are single
/// expressions and the else branch is mandatory.
struct IfElseExpr {
  ExprPtr cond;
  ExprPtr then_value;
  ExprPtr else_value;
};

struct Expr {
  std::variant<IntLit, BoolLit, VarRef, UnaryNeg, BinaryExpr, IndexExpr,
               BuiltinCall, IfElseExpr>
      node;
  SourceLoc loc;
};

struct Stmt;

struct AssignStmt {
  std::string target;
  Expr value;
};

struct ForInStmt {
  std::string binder;
  Expr iterable;
  std::vector<Stmt> body;  // never empty
};

struct Stmt {
  std::variant<AssignStmt, ForInStmt> node;
  SourceLoc loc;
};

struct Program {
  std::vector<Stmt> statements;
};

// Structural equality; source locations are ignored.
bool operator==(const Expr& a, const Expr& b);
bool operator==(const Stmt& a, const Stmt& b);
bool operator==(const Program& a, const Program& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
inline bool operator!=(const Stmt& a, const Stmt& b) { return !(a == b); }
inline bool operator!=(const Program& a, const Program& b) { return !(a == b); }

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceLoc loc, std::vector<std::string> expected,
             std::string found);

  SourceLoc loc() const { return loc_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  SourceLoc loc_;
  std::vector<std::string> expected_;
  std::string found_;
};

/// Parses a whole program. Statements are `name = expr` and
/// `for name in expr { stmt+ }`, one per line. Throws ParseError or LexError.
Program parse(std::string_view source);

/// Canonical source form: one statement per line, two-space indentation in
/// for-bodies, minimal parentheses. parse(pretty_print(p)) == p.
std::string pretty_print(const Program& program);
std::string pretty_print(const Expr& expr);

// dump-ast renderings. The JSON form round-trips through ast_from_json
// (which throws std::invalid_argument on malformed documents).
std::string ast_to_json(const Program& program);
Program ast_from_json(std::string_view json_text);
std::string ast_to_text(const Program& program);

}  // namespace hybridsl
