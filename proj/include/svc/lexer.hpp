#pragma once

#include <string>
#include <vector>

#include "svc/expr.hpp"

namespace svc::core {

struct Token {
  enum class Kind { Ident, Int, Double, String, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  long long int_value = 0;
  double double_value = 0.0;
  int line = 1, col = 1;
};

/// Shared tokenizer for constraint, spec-file and composition grammars.
/// Symbols are matched greedily (longest first). `//` comments run to
/// end of line.
class Lexer {
 public:
  explicit Lexer(const std::string& text);

  const Token& peek(size_t ahead = 0);
  Token next();
  bool at_end();

  [[noreturn]] void fail(const std::string& msg);
  [[noreturn]] void fail_at(const Token& t, const std::string& msg);

  /// Consumes a symbol token with exactly this text or fails.
  Token expect_symbol(const std::string& sym);
  /// Consumes an identifier token or fails.
  Token expect_ident();
  /// Consumes the next token if it is the given symbol.
  bool accept_symbol(const std::string& sym);
  /// Consumes the next token if it is the given identifier.
  bool accept_ident(const std::string& word);

 private:
  void ensure(size_t n);
  Token lex_one();

  std::string src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  std::vector<Token> lookahead_;
};

/// Parses a constraint starting at the lexer's current position, leaving
/// trailing tokens unconsumed (used by the catalog and composition parsers).
ExprPtr parse_constraint_from(Lexer& lex, const std::set<std::string>& params,
                              bool allow_assign = false);

}  // namespace svc::core
