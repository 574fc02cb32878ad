#include "svc/comp_ast.hpp"

#include <set>

#include "svc/lexer.hpp"

namespace svc::comp {

using core::Lexer;
using core::Token;

CompPtr make_service_ref(std::string name) {
  auto e = std::make_shared<CompositionExpr>();
  e->kind = CompositionExpr::Kind::Service;
  e->service = std::move(name);
  return e;
}

CompPtr make_comp(CompositionExpr::Kind kind, CompPtr left, CompPtr right,
                  core::ExprPtr condition) {
  auto e = std::make_shared<CompositionExpr>();
  e->kind = kind;
  e->left = std::move(left);
  e->right = std::move(right);
  e->condition = std::move(condition);
  return e;
}

namespace {

class CompParser {
 public:
  CompParser(Lexer& lex, const core::Catalog& catalog)
      : lex_(lex), catalog_(catalog) {
    for (const auto& [name, svc] : catalog)
      for (const auto& p : svc.params) params_.insert(p.name);
  }

  // All binary constructs share one precedence level, left-associative.
  CompPtr parse_expr() {
    CompPtr e = parse_term();
    for (;;) {
      CompositionExpr::Kind kind;
      if (lex_.accept_symbol(">>")) kind = CompositionExpr::Kind::Seq;
      else if (lex_.accept_symbol("||")) kind = CompositionExpr::Kind::Par;
      else if (lex_.accept_symbol("|>")) kind = CompositionExpr::Kind::Priority;
      else if (lex_.accept_symbol("<>")) kind = CompositionExpr::Kind::NoOrder;
      else if (lex_.accept_symbol("~")) kind = CompositionExpr::Kind::NonDet;
      else return e;
      e = make_comp(kind, e, parse_term());
    }
  }

 private:
  CompPtr parse_term() {
    if (lex_.accept_symbol("(")) {
      CompPtr e = parse_expr();
      lex_.expect_symbol(")");
      return e;
    }
    if (lex_.accept_ident("if")) {
      lex_.expect_symbol("(");
      core::ExprPtr c = core::parse_constraint_from(lex_, params_);
      lex_.expect_symbol(")");
      CompPtr then_branch = parse_term();
      if (!lex_.accept_ident("else")) lex_.fail("expected 'else'");
      CompPtr else_branch = parse_term();
      return make_comp(CompositionExpr::Kind::Cond, then_branch, else_branch, c);
    }
    if (lex_.accept_ident("while")) {
      lex_.expect_symbol("(");
      core::ExprPtr c = core::parse_constraint_from(lex_, params_);
      lex_.expect_symbol(")");
      return make_comp(CompositionExpr::Kind::Iter, parse_term(), nullptr, c);
    }
    Token t = lex_.expect_ident();
    if (!catalog_.count(t.text))
      lex_.fail_at(t, "unknown service '" + t.text + "'");
    return make_service_ref(t.text);
  }

  Lexer& lex_;
  const core::Catalog& catalog_;
  std::set<std::string> params_;
};

}  // namespace

CompPtr parse_composition_expr(const std::string& text,
                               const core::Catalog& catalog) {
  Lexer lex(text);
  CompParser p(lex, catalog);
  CompPtr e = p.parse_expr();
  if (!lex.at_end()) lex.fail("trailing input after composition expression");
  return e;
}

std::string render_composition(const CompPtr& e) {
  if (!e) return "?";
  using Kind = CompositionExpr::Kind;
  switch (e->kind) {
    case Kind::Service:
      return e->service;
    case Kind::Seq:
      return "(" + render_composition(e->left) + " >> " +
             render_composition(e->right) + ")";
    case Kind::Par:
      return "(" + render_composition(e->left) + " || " +
             render_composition(e->right) + ")";
    case Kind::Priority:
      return "(" + render_composition(e->left) + " |> " +
             render_composition(e->right) + ")";
    case Kind::NoOrder:
      return "(" + render_composition(e->left) + " <> " +
             render_composition(e->right) + ")";
    case Kind::NonDet:
      return "(" + render_composition(e->left) + " ~ " +
             render_composition(e->right) + ")";
    case Kind::Cond:
      return "(if (" + core::render(e->condition) + ") " +
             render_composition(e->left) + " else " +
             render_composition(e->right) + ")";
    case Kind::Iter:
      return "(while (" + core::render(e->condition) + ") " +
             render_composition(e->left) + ")";
  }
  return "?";
}

}  // namespace svc::comp
