#include "svc/lexer.hpp"

#include <array>
#include <cctype>
#include <cstdlib>

namespace svc::core {

namespace {

// Longest symbols first so greedy matching picks "<=" over "<", ">>" over ">".
constexpr std::array<const char*, 30> kSymbols = {
    "==", "!=", "<=", ">=", "&&", "||", "=>", ">>", "|>", "<>", ":=",
    "`>>",  // flow-signature parallel tail, accepted for symmetry
    "!",  "<", ">", "+", "-", "*", "(", ")", "{", "}", ";", ":", ",",
    ".",  "=", "~", "[", "]"};

}  // namespace

Lexer::Lexer(const std::string& text) : src_(text) {}

void Lexer::ensure(size_t n) {
  while (lookahead_.size() <= n) lookahead_.push_back(lex_one());
}

const Token& Lexer::peek(size_t ahead) {
  ensure(ahead);
  return lookahead_[ahead];
}

Token Lexer::next() {
  ensure(0);
  Token t = lookahead_.front();
  lookahead_.erase(lookahead_.begin());
  return t;
}

bool Lexer::at_end() { return peek().kind == Token::Kind::End; }

void Lexer::fail(const std::string& msg) { fail_at(peek(), msg); }

void Lexer::fail_at(const Token& t, const std::string& msg) {
  throw ParseError(msg + (t.kind == Token::Kind::End
                              ? " at end of input"
                              : " near '" + t.text + "'"),
                   t.line, t.col);
}

Token Lexer::expect_symbol(const std::string& sym) {
  Token t = next();
  if (t.kind != Token::Kind::Symbol || t.text != sym)
    fail_at(t, "expected '" + sym + "'");
  return t;
}

Token Lexer::expect_ident() {
  Token t = next();
  if (t.kind != Token::Kind::Ident) fail_at(t, "expected identifier");
  return t;
}

bool Lexer::accept_symbol(const std::string& sym) {
  const Token& t = peek();
  if (t.kind == Token::Kind::Symbol && t.text == sym) {
    next();
    return true;
  }
  return false;
}

bool Lexer::accept_ident(const std::string& word) {
  const Token& t = peek();
  if (t.kind == Token::Kind::Ident && t.text == word) {
    next();
    return true;
  }
  return false;
}

Token Lexer::lex_one() {
  auto peek_char = [&](size_t off) -> char {
    return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
  };
  auto advance = [&] {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  };

  // Skip whitespace and // comments.
  for (;;) {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      advance();
    if (peek_char(0) == '/' && peek_char(1) == '/') {
      while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      continue;
    }
    break;
  }

  Token t;
  t.line = line_;
  t.col = col_;
  if (pos_ >= src_.size()) return t;

  char c = src_[pos_];
  if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
    std::string word;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      word += src_[pos_];
      advance();
    }
    t.kind = Token::Kind::Ident;
    t.text = word;
    return t;
  }

  if (std::isdigit(static_cast<unsigned char>(c))) {
    std::string num;
    bool is_double = false;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E' ||
            ((src_[pos_] == '+' || src_[pos_] == '-') && num.size() > 0 &&
             (num.back() == 'e' || num.back() == 'E')))) {
      // '.' only counts as part of the number when followed by a digit,
      // so `ctx.age` style member access still lexes as three tokens.
      if (src_[pos_] == '.' &&
          !std::isdigit(static_cast<unsigned char>(peek_char(1))))
        break;
      if (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E')
        is_double = true;
      num += src_[pos_];
      advance();
    }
    if (is_double) {
      t.kind = Token::Kind::Double;
      t.double_value = std::strtod(num.c_str(), nullptr);
    } else {
      t.kind = Token::Kind::Int;
      t.int_value = std::strtoll(num.c_str(), nullptr, 10);
    }
    t.text = num;
    return t;
  }

  if (c == '"') {
    advance();
    std::string s;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) {
        advance();
        char esc = src_[pos_];
        s += esc == 'n' ? '\n' : esc == 't' ? '\t' : esc;
        advance();
      } else {
        s += src_[pos_];
        advance();
      }
    }
    if (pos_ >= src_.size())
      throw ParseError("unterminated string literal", t.line, t.col);
    advance();  // closing quote
    t.kind = Token::Kind::String;
    t.text = s;
    return t;
  }

  for (const char* sym : kSymbols) {
    size_t n = std::char_traits<char>::length(sym);
    if (src_.compare(pos_, n, sym) == 0) {
      for (size_t i = 0; i < n; ++i) advance();
      t.kind = Token::Kind::Symbol;
      t.text = sym;
      return t;
    }
  }

  throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
}

}  // namespace svc::core
