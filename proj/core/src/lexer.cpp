#include <array>
#include <cctype>

#include "hybridsl/syntax.hpp"

namespace hybridsl {
namespace {

constexpr std::array<std::string_view, 8> kKeywords = {
    "for", "in", "if", "else", "true", "false", "len", "range"};

bool ident_start(char c) {
  return c == '_' || std::isalpha(static_cast<unsigned char>(c));
}

bool ident_part(char c) {
  return c == '_' || std::isalnum(static_cast<unsigned char>(c));
}

}  // namespace

bool is_keyword(std::string_view word) {
  for (auto kw : kKeywords) {
    if (word == kw) return true;
  }
  return false;
}

bool is_identifier(std::string_view word) {
  if (word.empty() || is_keyword(word)) return false;
  if (!ident_start(word[0])) return false;
  for (char c : word.substr(1)) {
    if (!ident_part(c)) return false;
  }
  return true;
}

LexError::LexError(SourceLoc loc, char offending)
    : std::runtime_error("unexpected character '" + std::string(1, offending) +
                         "' at " + std::to_string(loc.line) + ":" +
                         std::to_string(loc.col)),
      loc_(loc),
      offending_(offending) {}

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  const std::size_t n = source.size();

  auto push = [&](TokenKind kind, std::size_t start, std::size_t len,
                  SourceLoc loc) {
    tokens.push_back({kind, std::string(source.substr(start, len)), loc});
  };

  while (i < n) {
    char c = source[i];
    if (c == '\n') {
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      while (i < n && source[i] != '\n') {
        ++i;
        ++col;
      }
      continue;
    }

    const SourceLoc loc{line, col};
    const std::size_t start = i;

    if (ident_start(c)) {
      while (i < n && ident_part(source[i])) {
        ++i;
        ++col;
      }
      std::string_view word = source.substr(start, i - start);
      push(is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier, start,
           i - start, loc);
      continue;
    }

    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < n && std::isdigit(static_cast<unsigned char>(source[i]))) {
        ++i;
        ++col;
      }
      push(TokenKind::Integer, start, i - start, loc);
      continue;
    }

    switch (c) {
      case '=':
      case '<':
      case '>':
        ++i;
        ++col;
        if (i < n && source[i] == '=') {
          ++i;
          ++col;
        }
        push(TokenKind::Operator, start, i - start, loc);
        continue;
      case '!':
        ++i;
        ++col;
        if (i < n && source[i] == '=') {
          ++i;
          ++col;
          push(TokenKind::Operator, start, 2, loc);
          continue;
        }
        throw LexError(loc, '!');
      case '+':
      case '-':
      case '*':
      case '/':
        ++i;
        ++col;
        push(TokenKind::Operator, start, 1, loc);
        continue;
      case '(':
      case ')':
      case '{':
      case '}':
      case '[':
      case ']':
        ++i;
        ++col;
        push(TokenKind::Punct, start, 1, loc);
        continue;
      default:
        throw LexError(loc, c);
    }
  }
  return tokens;
}

}  // namespace hybridsl
