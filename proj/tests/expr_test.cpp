#include <random>

#include "doctest.h"
#include "svc/expr.hpp"

using namespace svc::core;

namespace {

const std::set<std::string> kParams = {"a", "b", "p", "q", "numberOfHours",
                                       "deposit", "CarType"};

ExprPtr parse(const std::string& text, bool allow_assign = false) {
  return parse_constraint(text, kParams, allow_assign);
}

Environment env_with(std::map<std::string, Value> bindings,
                     std::vector<ContextEntry> ctx = {}) {
  Environment e;
  e.bindings = std::move(bindings);
  e.requester_context.entries = std::move(ctx);
  return e;
}

}  // namespace

TEST_CASE("parse/render round trips stay canonical") {
  CHECK(render(parse("ctx.age >= 21")) == "ctx.age>=21");
  CHECK(render(parse("60*numberOfHours+100")) == "(60*numberOfHours)+100");
  CHECK(render(parse("a + b * a")) == "a+(b*a)");
  CHECK(render(parse("p && q || p")) == "(p&&q)||p");
  CHECK(render(parse("!(p && q)")) == "!(p&&q)");
  CHECK(render(parse("max(a, b)")) == "max(a,b)");
  CHECK(render(parse("CarType == toyota")) == "CarType==toyota");
  CHECK(render(parse("deposit := 300", true)) == "deposit := 300");
}

TEST_CASE("model rendering rewrites context references and assignment") {
  CHECK(render(parse("ctx.age >= 21"), RenderStyle::Model) ==
        "RequesterContext.age>=21");
  CHECK(render(parse("deposit := 300", true), RenderStyle::Model) ==
        "deposit = 300");
}

TEST_CASE("implication is right-associative and lowest precedence") {
  auto e = parse("p => q => p");
  REQUIRE(e->kind == Expr::Kind::Binary);
  CHECK(e->op == BinOp::Implies);
  CHECK(e->lhs->kind == Expr::Kind::Var);
  // p => (q => p) is a tautology
  for (bool p : {false, true})
    for (bool q : {false, true})
      CHECK(eval_bool(e, env_with({{"p", p}, {"q", q}})));
}

TEST_CASE("evaluation: arithmetic, comparisons, promotion") {
  CHECK(std::get<long long>(eval_constraint(
            parse("60*numberOfHours+100"),
            env_with({{"numberOfHours", 5LL}}))) == 400);
  CHECK(eval_bool(parse("a < 2.5"), env_with({{"a", 2LL}})));
  CHECK(eval_bool(parse("ctx.membership == caa"),
                  env_with({}, {{"membership", std::string("caa")}})));
  CHECK_FALSE(eval_bool(parse("ctx.membership == caa"),
                        env_with({}, {{"membership", std::string("none")}})));
  CHECK(std::get<long long>(eval_constraint(
            parse("max(a, b)"), env_with({{"a", 3LL}, {"b", 9LL}}))) == 9);
  // assignment rules are checked as equalities
  CHECK(eval_bool(parse("deposit := 300", true), env_with({{"deposit", 300LL}})));
}

TEST_CASE("evaluation errors on unbound names and type mismatches") {
  CHECK_THROWS_AS(eval_constraint(parse("a+1"), env_with({})), EvalError);
  CHECK_THROWS_AS(eval_bool(parse("p && q"), env_with({{"p", true}, {"q", 3LL}})),
                  EvalError);
  CHECK_THROWS_AS(eval_constraint(parse("ctx.age > 1"), env_with({})), EvalError);
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse("(a + "), ParseError);
  CHECK_THROWS_AS(parse("a ==" ), ParseError);
  CHECK_THROWS_AS(parse("deposit := 300"), ParseError);  // assign not allowed
}

TEST_CASE("structural equality follows canonical rendering") {
  CHECK(expr_equal(parse("a+b"), parse("a + b")));
  CHECK_FALSE(expr_equal(parse("a+b"), parse("b+a")));
}

TEST_CASE("collect_vars splits parameters from context dimensions") {
  std::set<std::string> vars, dims;
  collect_vars(parse("a > 1 && ctx.age >= 21 && p"), vars, dims);
  CHECK(vars == std::set<std::string>{"a", "p"});
  CHECK(dims == std::set<std::string>{"age"});
}

// ---------------------------------------------------------------------------
// Randomized differential check against an independently written evaluator.
// ---------------------------------------------------------------------------

namespace {

long long naive_int(const ExprPtr& e, const Environment& env);

bool naive_bool(const ExprPtr& e, const Environment& env) {
  switch (e->kind) {
    case Expr::Kind::Literal:
      return std::get<bool>(e->literal);
    case Expr::Kind::Var:
      return std::get<bool>(env.bindings.at(e->name));
    case Expr::Kind::Not:
      return !naive_bool(e->lhs, env);
    default:
      break;
  }
  switch (e->op) {
    case BinOp::And: return naive_bool(e->lhs, env) && naive_bool(e->rhs, env);
    case BinOp::Or: return naive_bool(e->lhs, env) || naive_bool(e->rhs, env);
    case BinOp::Implies:
      return !naive_bool(e->lhs, env) || naive_bool(e->rhs, env);
    case BinOp::Eq: return naive_int(e->lhs, env) == naive_int(e->rhs, env);
    case BinOp::Ne: return naive_int(e->lhs, env) != naive_int(e->rhs, env);
    case BinOp::Lt: return naive_int(e->lhs, env) < naive_int(e->rhs, env);
    case BinOp::Le: return naive_int(e->lhs, env) <= naive_int(e->rhs, env);
    case BinOp::Gt: return naive_int(e->lhs, env) > naive_int(e->rhs, env);
    case BinOp::Ge: return naive_int(e->lhs, env) >= naive_int(e->rhs, env);
    default: throw std::logic_error("not a boolean operator");
  }
}

long long naive_int(const ExprPtr& e, const Environment& env) {
  switch (e->kind) {
    case Expr::Kind::Literal:
      return std::get<long long>(e->literal);
    case Expr::Kind::Var:
      return std::get<long long>(env.bindings.at(e->name));
    default:
      break;
  }
  switch (e->op) {
    case BinOp::Add: return naive_int(e->lhs, env) + naive_int(e->rhs, env);
    case BinOp::Sub: return naive_int(e->lhs, env) - naive_int(e->rhs, env);
    case BinOp::Mul: return naive_int(e->lhs, env) * naive_int(e->rhs, env);
    case BinOp::Max:
      return std::max(naive_int(e->lhs, env), naive_int(e->rhs, env));
    case BinOp::Min:
      return std::min(naive_int(e->lhs, env), naive_int(e->rhs, env));
    default: throw std::logic_error("not an integer operator");
  }
}

ExprPtr random_int_expr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 4);
  switch (pick(rng)) {
    case 0:
      return make_literal((long long)(rng() % 7) - 3);
    case 1:
      return make_var(rng() % 2 ? "a" : "b");
    default: {
      static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul,
                                  BinOp::Max, BinOp::Min};
      return make_binary(ops[rng() % 5], random_int_expr(rng, depth - 1),
                         random_int_expr(rng, depth - 1));
    }
  }
}

ExprPtr random_bool_expr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 4);
  switch (pick(rng)) {
    case 0:
      return make_literal(rng() % 2 == 0);
    case 1:
      return make_var(rng() % 2 ? "p" : "q");
    case 2:
      return make_not(random_bool_expr(rng, depth - 1));
    case 3: {
      static const BinOp ops[] = {BinOp::And, BinOp::Or, BinOp::Implies};
      return make_binary(ops[rng() % 3], random_bool_expr(rng, depth - 1),
                         random_bool_expr(rng, depth - 1));
    }
    default: {
      static const BinOp ops[] = {BinOp::Eq, BinOp::Ne, BinOp::Lt,
                                  BinOp::Le, BinOp::Gt, BinOp::Ge};
      return make_binary(ops[rng() % 6], random_int_expr(rng, depth - 1),
                         random_int_expr(rng, depth - 1));
    }
  }
}

}  // namespace

TEST_CASE("random expressions agree with the naive evaluator") {
  for (unsigned seed = 1; seed <= 120; ++seed) {
    std::mt19937 rng(seed);
    Environment env = env_with({{"a", (long long)(rng() % 9) - 4},
                                {"b", (long long)(rng() % 9) - 4},
                                {"p", rng() % 2 == 0},
                                {"q", rng() % 2 == 0}});
    ExprPtr e = random_bool_expr(rng, 4);
    CAPTURE(seed);
    CAPTURE(render(e));
    CHECK(eval_bool(e, env) == naive_bool(e, env));
    // the canonical render parses back to an equal expression
    CHECK(expr_equal(parse(render(e)), e));
  }
}
