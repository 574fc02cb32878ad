#include "svc/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "svc/lexer.hpp"

namespace svc::core {

// ---------------------------------------------------------------------------
// Types and values
// ---------------------------------------------------------------------------

std::string type_name(const DataType& t) {
  switch (t.kind) {
    case TypeKind::Bool: return "bool";
    case TypeKind::Int: return "int";
    case TypeKind::Double: return "double";
    case TypeKind::String: return "string";
    case TypeKind::Enum: return "enum " + t.enum_name;
    case TypeKind::Time: return "time";
    case TypeKind::Currency: return "currency";
    case TypeKind::PricingUnit: return "pricing_unit";
  }
  return "?";
}

std::optional<DataType> type_from_name(const std::string& name) {
  if (name == "bool") return DataType::simple(TypeKind::Bool);
  if (name == "int") return DataType::simple(TypeKind::Int);
  if (name == "double") return DataType::simple(TypeKind::Double);
  if (name == "string") return DataType::simple(TypeKind::String);
  if (name == "time") return DataType::simple(TypeKind::Time);
  if (name == "currency") return DataType::simple(TypeKind::Currency);
  if (name == "pricing_unit") return DataType::simple(TypeKind::PricingUnit);
  return std::nullopt;
}

bool value_conforms(const Value& v, const DataType& t) {
  switch (t.kind) {
    case TypeKind::Bool:
      return std::holds_alternative<bool>(v);
    case TypeKind::Int:
    case TypeKind::Time:
      return std::holds_alternative<long long>(v);
    case TypeKind::Double:
      return std::holds_alternative<double>(v) ||
             std::holds_alternative<long long>(v);
    case TypeKind::String:
    case TypeKind::Currency:
    case TypeKind::PricingUnit:
      return std::holds_alternative<std::string>(v);
    case TypeKind::Enum:
      if (const auto* s = std::get_if<std::string>(&v))
        return std::find(t.enum_values.begin(), t.enum_values.end(), *s) !=
               t.enum_values.end();
      return false;
  }
  return false;
}

namespace {

bool is_bare_symbol(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
    return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  return s != "true" && s != "false" && s != "ctx" && s != "max" && s != "min";
}

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string render_value(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const auto* i = std::get_if<long long>(&v)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&v)) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, *d);
    std::string s(buf, end);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
      s += ".0";
    return s;
  }
  const auto& s = std::get<std::string>(v);
  return is_bare_symbol(s) ? s : quote_string(s);
}

// ---------------------------------------------------------------------------
// Expression construction and rendering
// ---------------------------------------------------------------------------

ExprPtr make_literal(Value v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Literal;
  e->literal = std::move(v);
  return e;
}

ExprPtr make_var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Var;
  e->name = std::move(name);
  return e;
}

ExprPtr make_ctx_ref(std::string dimension) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::CtxRef;
  e->name = std::move(dimension);
  return e;
}

ExprPtr make_not(ExprPtr inner) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Not;
  e->lhs = std::move(inner);
  return e;
}

ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Binary;
  e->op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

namespace {

const char* op_text(BinOp op) {
  switch (op) {
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    case BinOp::Implies: return "=>";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Max: return "max";
    case BinOp::Min: return "min";
    case BinOp::Assign: return ":=";
  }
  return "?";
}

std::string render_child(const Expr& e, RenderStyle style) {
  std::string s = render(e, style);
  if (e.kind == Expr::Kind::Binary && e.op != BinOp::Max && e.op != BinOp::Min)
    return "(" + s + ")";
  return s;
}

}  // namespace

std::string render(const Expr& e, RenderStyle style) {
  switch (e.kind) {
    case Expr::Kind::Literal:
      return render_value(e.literal);
    case Expr::Kind::Var:
      return e.name;
    case Expr::Kind::CtxRef:
      return (style == RenderStyle::Model ? "RequesterContext." : "ctx.") + e.name;
    case Expr::Kind::Not:
      return "!(" + render(*e.lhs, style) + ")";
    case Expr::Kind::Binary:
      if (e.op == BinOp::Max || e.op == BinOp::Min)
        return std::string(op_text(e.op)) + "(" + render(*e.lhs, style) + "," +
               render(*e.rhs, style) + ")";
      if (e.op == BinOp::Assign)
        return render(*e.lhs, style) +
               (style == RenderStyle::Model ? " = " : " := ") +
               render_child(*e.rhs, style);
      return render_child(*e.lhs, style) + op_text(e.op) +
             render_child(*e.rhs, style);
  }
  return "?";
}

std::string render(const ExprPtr& e, RenderStyle style) {
  return e ? render(*e, style) : "true";
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  return render(a) == render(b);
}

void collect_vars(const ExprPtr& e, std::set<std::string>& vars,
                  std::set<std::string>& ctx_dims) {
  if (!e) return;
  switch (e->kind) {
    case Expr::Kind::Var:
      vars.insert(e->name);
      break;
    case Expr::Kind::CtxRef:
      ctx_dims.insert(e->name);
      break;
    case Expr::Kind::Not:
      collect_vars(e->lhs, vars, ctx_dims);
      break;
    case Expr::Kind::Binary:
      collect_vars(e->lhs, vars, ctx_dims);
      collect_vars(e->rhs, vars, ctx_dims);
      break;
    case Expr::Kind::Literal:
      break;
  }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

const Value* ContextInfo::find(const std::string& dimension) const {
  for (const auto& e : entries)
    if (e.dimension == dimension) return &e.tag;
  return nullptr;
}

namespace {

bool is_numeric(const Value& v) {
  return std::holds_alternative<long long>(v) ||
         std::holds_alternative<double>(v);
}

double as_double(const Value& v) {
  if (const auto* i = std::get_if<long long>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

Value numeric_binop(BinOp op, const Value& a, const Value& b) {
  if (std::holds_alternative<long long>(a) &&
      std::holds_alternative<long long>(b)) {
    long long x = std::get<long long>(a), y = std::get<long long>(b);
    switch (op) {
      case BinOp::Add: return x + y;
      case BinOp::Sub: return x - y;
      case BinOp::Mul: return x * y;
      case BinOp::Max: return std::max(x, y);
      case BinOp::Min: return std::min(x, y);
      default: break;
    }
  }
  double x = as_double(a), y = as_double(b);
  switch (op) {
    case BinOp::Add: return x + y;
    case BinOp::Sub: return x - y;
    case BinOp::Mul: return x * y;
    case BinOp::Max: return std::max(x, y);
    case BinOp::Min: return std::min(x, y);
    default: break;
  }
  throw EvalError("not an arithmetic operator");
}

bool values_equal(const Value& a, const Value& b) {
  if (is_numeric(a) && is_numeric(b)) return as_double(a) == as_double(b);
  if (a.index() != b.index()) throw EvalError("type mismatch in comparison");
  return a == b;
}

int compare_order(const Value& a, const Value& b) {
  if (is_numeric(a) && is_numeric(b)) {
    double x = as_double(a), y = as_double(b);
    return x < y ? -1 : x > y ? 1 : 0;
  }
  if (std::holds_alternative<std::string>(a) &&
      std::holds_alternative<std::string>(b)) {
    const auto &x = std::get<std::string>(a), &y = std::get<std::string>(b);
    return x < y ? -1 : x > y ? 1 : 0;
  }
  throw EvalError("values are not ordered");
}

bool require_bool(const Value& v, const char* what) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  throw EvalError(std::string("expected boolean operand for ") + what);
}

}  // namespace

Value eval_constraint(const ExprPtr& e, const Environment& env) {
  if (!e) throw EvalError("null expression");
  switch (e->kind) {
    case Expr::Kind::Literal:
      return e->literal;
    case Expr::Kind::Var: {
      auto it = env.bindings.find(e->name);
      if (it == env.bindings.end())
        throw EvalError("unbound name '" + e->name + "'");
      return it->second;
    }
    case Expr::Kind::CtxRef: {
      const Value* v = env.requester_context.find(e->name);
      if (!v) throw EvalError("unbound context dimension '" + e->name + "'");
      return *v;
    }
    case Expr::Kind::Not:
      return !require_bool(eval_constraint(e->lhs, env), "!");
    case Expr::Kind::Binary: {
      switch (e->op) {
        case BinOp::And:
          return require_bool(eval_constraint(e->lhs, env), "&&") &&
                 require_bool(eval_constraint(e->rhs, env), "&&");
        case BinOp::Or:
          return require_bool(eval_constraint(e->lhs, env), "||") ||
                 require_bool(eval_constraint(e->rhs, env), "||");
        case BinOp::Implies:
          return !require_bool(eval_constraint(e->lhs, env), "=>") ||
                 require_bool(eval_constraint(e->rhs, env), "=>");
        case BinOp::Eq:
        case BinOp::Assign:  // legal-effect rules satisfiability reading
          return values_equal(eval_constraint(e->lhs, env),
                              eval_constraint(e->rhs, env));
        case BinOp::Ne:
          return !values_equal(eval_constraint(e->lhs, env),
                               eval_constraint(e->rhs, env));
        case BinOp::Lt:
          return compare_order(eval_constraint(e->lhs, env),
                               eval_constraint(e->rhs, env)) < 0;
        case BinOp::Le:
          return compare_order(eval_constraint(e->lhs, env),
                               eval_constraint(e->rhs, env)) <= 0;
        case BinOp::Gt:
          return compare_order(eval_constraint(e->lhs, env),
                               eval_constraint(e->rhs, env)) > 0;
        case BinOp::Ge:
          return compare_order(eval_constraint(e->lhs, env),
                               eval_constraint(e->rhs, env)) >= 0;
        case BinOp::Add:
        case BinOp::Sub:
        case BinOp::Mul:
        case BinOp::Max:
        case BinOp::Min: {
          Value a = eval_constraint(e->lhs, env);
          Value b = eval_constraint(e->rhs, env);
          if (!is_numeric(a) || !is_numeric(b))
            throw EvalError("arithmetic on non-numeric value");
          return numeric_binop(e->op, a, b);
        }
      }
      break;
    }
  }
  throw EvalError("malformed expression");
}

bool eval_bool(const ExprPtr& e, const Environment& env) {
  return require_bool(eval_constraint(e, env), "constraint");
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

ParseError::ParseError(std::string msg, int l, int c)
    : std::runtime_error(msg + " (line " + std::to_string(l) + ", col " +
                         std::to_string(c) + ")"),
      line(l),
      col(c) {}

namespace {

class ConstraintParser {
 public:
  ConstraintParser(Lexer& lex, const std::set<std::string>& params)
      : lex_(lex), params_(params) {}

  // implies is right-associative and lowest.
  ExprPtr parse_expr() {
    ExprPtr lhs = parse_or();
    if (lex_.accept_symbol("=>")) return make_binary(BinOp::Implies, lhs, parse_expr());
    return lhs;
  }

 private:
  ExprPtr parse_or() {
    ExprPtr e = parse_and();
    while (lex_.accept_symbol("||")) e = make_binary(BinOp::Or, e, parse_and());
    return e;
  }

  ExprPtr parse_and() {
    ExprPtr e = parse_cmp();
    while (lex_.accept_symbol("&&")) e = make_binary(BinOp::And, e, parse_cmp());
    return e;
  }

  ExprPtr parse_cmp() {
    ExprPtr e = parse_add();
    for (;;) {
      BinOp op;
      if (lex_.accept_symbol("==")) op = BinOp::Eq;
      else if (lex_.accept_symbol("!=")) op = BinOp::Ne;
      else if (lex_.accept_symbol("<=")) op = BinOp::Le;
      else if (lex_.accept_symbol(">=")) op = BinOp::Ge;
      else if (lex_.accept_symbol("<")) op = BinOp::Lt;
      else if (lex_.accept_symbol(">")) op = BinOp::Gt;
      else return e;
      e = make_binary(op, e, parse_add());
    }
  }

  ExprPtr parse_add() {
    ExprPtr e = parse_mul();
    for (;;) {
      if (lex_.accept_symbol("+")) e = make_binary(BinOp::Add, e, parse_mul());
      else if (lex_.accept_symbol("-")) e = make_binary(BinOp::Sub, e, parse_mul());
      else return e;
    }
  }

  ExprPtr parse_mul() {
    ExprPtr e = parse_unary();
    while (lex_.accept_symbol("*")) e = make_binary(BinOp::Mul, e, parse_unary());
    return e;
  }

  ExprPtr parse_unary() {
    if (lex_.accept_symbol("!")) return make_not(parse_unary());
    if (lex_.accept_symbol("-")) {
      ExprPtr e = parse_unary();
      if (e->kind == Expr::Kind::Literal) {
        if (const auto* i = std::get_if<long long>(&e->literal))
          return make_literal(-*i);
        if (const auto* d = std::get_if<double>(&e->literal))
          return make_literal(-*d);
      }
      return make_binary(BinOp::Sub, make_literal(0LL), e);
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Token::Kind::Int: {
        Token tok = lex_.next();
        return make_literal(tok.int_value);
      }
      case Token::Kind::Double: {
        Token tok = lex_.next();
        return make_literal(tok.double_value);
      }
      case Token::Kind::String: {
        Token tok = lex_.next();
        return make_literal(tok.text);
      }
      case Token::Kind::Symbol:
        if (t.text == "(") {
          lex_.next();
          ExprPtr e = parse_expr();
          lex_.expect_symbol(")");
          return e;
        }
        lex_.fail("expected expression");
      case Token::Kind::Ident: {
        Token tok = lex_.next();
        if (tok.text == "true") return make_literal(true);
        if (tok.text == "false") return make_literal(false);
        if (tok.text == "ctx") {
          lex_.expect_symbol(".");
          return make_ctx_ref(lex_.expect_ident().text);
        }
        if ((tok.text == "max" || tok.text == "min") &&
            lex_.peek().kind == Token::Kind::Symbol && lex_.peek().text == "(") {
          lex_.next();
          ExprPtr a = parse_expr();
          lex_.expect_symbol(",");
          ExprPtr b = parse_expr();
          lex_.expect_symbol(")");
          return make_binary(tok.text == "max" ? BinOp::Max : BinOp::Min, a, b);
        }
        if (params_.count(tok.text)) return make_var(tok.text);
        // Unknown identifiers are enum-like symbol literals (caa, toyota).
        return make_literal(tok.text);
      }
      case Token::Kind::End:
        lex_.fail("expected expression");
    }
    lex_.fail("expected expression");
  }

  Lexer& lex_;
  const std::set<std::string>& params_;
};

}  // namespace

ExprPtr parse_constraint_from(Lexer& lex, const std::set<std::string>& params,
                              bool allow_assign) {
  if (allow_assign && lex.peek().kind == Token::Kind::Ident &&
      lex.peek(1).kind == Token::Kind::Symbol && lex.peek(1).text == ":=") {
    Token name = lex.next();
    lex.next();  // :=
    ConstraintParser p(lex, params);
    return make_binary(BinOp::Assign, make_var(name.text), p.parse_expr());
  }
  ConstraintParser p(lex, params);
  return p.parse_expr();
}

ExprPtr parse_constraint(const std::string& text,
                         const std::set<std::string>& params,
                         bool allow_assign) {
  Lexer lex(text);
  ExprPtr e = parse_constraint_from(lex, params, allow_assign);
  if (!lex.at_end()) lex.fail("trailing input after constraint");
  return e;
}

}  // namespace svc::core
