#include <charconv>
#include <utility>

#include "hybridsl/syntax.hpp"

namespace hybridsl {
namespace {

std::string describe(const Token& tok) { return "'" + tok.text + "'"; }

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Program parse_program() {
    Program program;
    while (!at_end()) {
      if (!program.statements.empty()) require_new_line();
      program.statements.push_back(parse_stmt());
    }
    return program;
  }

 private:
  const Token* peek() const {
    return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr;
  }

  const Token& advance() { return tokens_[pos_++]; }

  bool at_end() const { return pos_ >= tokens_.size(); }

  // Line of the most recently consumed token.
  int last_line() const {
    return pos_ == 0 ? 1 : tokens_[pos_ - 1].loc.line;
  }

  // Position just past the last token, for errors at end of input.
  SourceLoc here() const {
    if (const Token* t = peek()) return t->loc;
    if (tokens_.empty()) return {1, 1};
    const Token& last = tokens_.back();
    return {last.loc.line, last.loc.col + static_cast<int>(last.text.size())};
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string found = peek() ? describe(*peek()) : "end of input";
    throw ParseError(here(), std::move(expected), std::move(found));
  }

  bool check(TokenKind kind, std::string_view text) const {
    const Token* t = peek();
    return t && t->kind == kind && t->text == text;
  }

  const Token& expect(TokenKind kind, std::string_view text) {
    if (!check(kind, text)) fail({"'" + std::string(text) + "'"});
    return advance();
  }

  bool accept(TokenKind kind, std::string_view text) {
    if (!check(kind, text)) return false;
    advance();
    return true;
  }

  // One statement per line: the next statement may not start on the line
  // where the previous one ended.
  void require_new_line() const {
    const Token* t = peek();
    if (t && t->loc.line <= last_line()) {
      throw ParseError(t->loc, {"newline before next statement"}, describe(*t));
    }
  }

  // Infix and postfix operators continue an expression across a line break
  // only inside parentheses, brackets or if-branches.
  bool may_continue() const {
    const Token* t = peek();
    if (!t) return false;
    return depth_ > 0 || t->loc.line == last_line();
  }

  bool peek_operator(std::string_view text) const {
    return may_continue() && check(TokenKind::Operator, text);
  }

  Stmt parse_stmt() {
    const Token* t = peek();
    if (!t) fail({"statement"});
    if (t->kind == TokenKind::Keyword && t->text == "for") return parse_for();
    if (t->kind == TokenKind::Identifier) {
      Token name = advance();
      expect(TokenKind::Operator, "=");
      Expr value = parse_expr();
      Stmt stmt;
      stmt.loc = name.loc;
      stmt.node = AssignStmt{std::move(name.text), std::move(value)};
      return stmt;
    }
    fail({"identifier", "'for'"});
  }

  Stmt parse_for() {
    Token kw = advance();
    const Token* name = peek();
    if (!name || name->kind != TokenKind::Identifier) fail({"identifier"});
    Token binder = advance();
    expect(TokenKind::Keyword, "in");
    Expr iterable = parse_expr();
    expect(TokenKind::Punct, "{");
    std::vector<Stmt> body;
    while (!check(TokenKind::Punct, "}")) {
      if (at_end()) fail({"statement", "'}'"});
      if (!body.empty()) require_new_line();
      body.push_back(parse_stmt());
    }
    if (body.empty()) fail({"statement"});
    expect(TokenKind::Punct, "}");
    Stmt stmt;
    stmt.loc = kw.loc;
    stmt.node = ForInStmt{std::move(binder.text), std::move(iterable),
                          std::move(body)};
    return stmt;
  }

  Expr parse_expr() { return parse_comparison(); }

  Expr parse_comparison() {
    Expr lhs = parse_additive();
    const Token* t = peek();
    if (!may_continue() || !t || t->kind != TokenKind::Operator) return lhs;
    BinOp op;
    if (t->text == "==") {
      op = BinOp::Eq;
    } else if (t->text == "!=") {
      op = BinOp::Ne;
    } else if (t->text == "<") {
      op = BinOp::Lt;
    } else if (t->text == "<=") {
      op = BinOp::Le;
    } else if (t->text == ">") {
      op = BinOp::Gt;
    } else if (t->text == ">=") {
      op = BinOp::Ge;
    } else {
      return lhs;
    }
    SourceLoc loc = advance().loc;
    Expr rhs = parse_additive();
    const Token* chained = peek();
    if (may_continue() && chained && chained->kind == TokenKind::Operator &&
        is_cmp_text(chained->text)) {
      throw ParseError(chained->loc,
                       {"end of comparison (comparisons are non-associative)"},
                       describe(*chained));
    }
    return make_binary(op, std::move(lhs), std::move(rhs), loc);
  }

  static bool is_cmp_text(std::string_view s) {
    return s == "==" || s == "!=" || s == "<" || s == "<=" || s == ">" ||
           s == ">=";
  }

  Expr parse_additive() {
    Expr lhs = parse_term();
    for (;;) {
      if (peek_operator("+")) {
        SourceLoc loc = advance().loc;
        lhs = make_binary(BinOp::Add, std::move(lhs), parse_term(), loc);
      } else if (peek_operator("-")) {
        SourceLoc loc = advance().loc;
        lhs = make_binary(BinOp::Sub, std::move(lhs), parse_term(), loc);
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (peek_operator("*")) {
        SourceLoc loc = advance().loc;
        lhs = make_binary(BinOp::Mul, std::move(lhs), parse_unary(), loc);
      } else if (peek_operator("/")) {
        SourceLoc loc = advance().loc;
        lhs = make_binary(BinOp::Div, std::move(lhs), parse_unary(), loc);
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (check(TokenKind::Operator, "-")) {
      SourceLoc loc = advance().loc;
      Expr operand = parse_unary();
      Expr e;
      e.loc = loc;
      e.node = UnaryNeg{box(std::move(operand))};
      return e;
    }
    return parse_postfix();
  }

  Expr parse_postfix() {
    Expr e = parse_primary();
    while (may_continue() && check(TokenKind::Punct, "[")) {
      SourceLoc loc = advance().loc;
      ++depth_;
      Expr index = parse_expr();
      expect(TokenKind::Punct, "]");
      --depth_;
      Expr idx;
      idx.loc = loc;
      idx.node = IndexExpr{box(std::move(e)), box(std::move(index))};
      e = std::move(idx);
    }
    return e;
  }

  Expr parse_primary() {
    const Token* t = peek();
    if (!t) fail({"expression"});
    switch (t->kind) {
      case TokenKind::Integer: {
        Token tok = advance();
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(
            tok.text.data(), tok.text.data() + tok.text.size(), value);
        if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
          throw ParseError(tok.loc, {"integer literal in range"}, tok.text);
        }
        Expr e;
        e.loc = tok.loc;
        e.node = IntLit{value};
        return e;
      }
      case TokenKind::Identifier: {
        Token tok = advance();
        Expr e;
        e.loc = tok.loc;
        e.node = VarRef{std::move(tok.text)};
        return e;
      }
      case TokenKind::Keyword: {
        if (t->text == "true" || t->text == "false") {
          Token tok = advance();
          Expr e;
          e.loc = tok.loc;
          e.node = BoolLit{tok.text == "true"};
          return e;
        }
        if (t->text == "len" || t->text == "range") {
          Token tok = advance();
          expect(TokenKind::Punct, "(");
          ++depth_;
          Expr arg = parse_expr();
          expect(TokenKind::Punct, ")");
          --depth_;
          Expr e;
          e.loc = tok.loc;
          e.node = BuiltinCall{
              tok.text == "len" ? Builtin::Len : Builtin::Range,
              box(std::move(arg))};
          return e;
        }
        if (t->text == "if") return parse_if();
        fail({"expression"});
      }
      case TokenKind::Punct: {
        if (t->text == "(") {
          advance();
          ++depth_;
          Expr e = parse_expr();
          expect(TokenKind::Punct, ")");
          --depth_;
          return e;
        }
        fail({"expression"});
      }
      default:
        fail({"expression"});
    }
  }

  // if cond { expr } else { expr } — each branch is a single expression.
  Expr parse_if() {
    Token kw = advance();
    Expr cond = parse_expr();
    expect(TokenKind::Punct, "{");
    ++depth_;
    Expr then_value = parse_expr();
    expect(TokenKind::Punct, "}");
    --depth_;
    expect(TokenKind::Keyword, "else");
    expect(TokenKind::Punct, "{");
    ++depth_;
    Expr else_value = parse_expr();
    expect(TokenKind::Punct, "}");
    --depth_;
    Expr e;
    e.loc = kw.loc;
    e.node = IfElseExpr{box(std::move(cond)), box(std::move(then_value)),
                        box(std::move(else_value))};
    return e;
  }

  static ExprPtr box(Expr e) { return std::make_unique<Expr>(std::move(e)); }

  static Expr make_binary(BinOp op, Expr lhs, Expr rhs, SourceLoc loc) {
    Expr e;
    e.loc = loc;
    e.node = BinaryExpr{op, box(std::move(lhs)), box(std::move(rhs))};
    return e;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int depth_ = 0;  // parenthesis / bracket / if-brace nesting
};

std::string join_expected(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i > 0) out += i + 1 == expected.size() ? " or " : ", ";
    out += expected[i];
  }
  return out;
}

}  // namespace

ParseError::ParseError(SourceLoc loc, std::vector<std::string> expected,
                       std::string found)
    : std::runtime_error("expected " + join_expected(expected) + " but found " +
                         found + " at " + std::to_string(loc.line) + ":" +
                         std::to_string(loc.col)),
      loc_(loc),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

Program parse(std::string_view source) {
  Parser parser(tokenize(source));
  return parser.parse_program();
}

}  // namespace hybridsl
