#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace svc::core {

// ---------------------------------------------------------------------------
// Values and data types
// ---------------------------------------------------------------------------

using Value = std::variant<bool, long long, double, std::string>;

enum class TypeKind {
  Bool,
  Int,
  Double,
  String,
  Enum,
  Time,
  Currency,
  PricingUnit,
};

struct DataType {
  TypeKind kind = TypeKind::String;
  std::string enum_name;                  // Enum only
  std::vector<std::string> enum_values;   // Enum only, non-empty, duplicate-free

  static DataType simple(TypeKind k) { return DataType{k, {}, {}}; }
};

std::string type_name(const DataType& t);
std::optional<DataType> type_from_name(const std::string& name);

/// True when v is a value of type t (ints are accepted for double/time slots).
bool value_conforms(const Value& v, const DataType& t);

std::string render_value(const Value& v);

// ---------------------------------------------------------------------------
// Constraint expressions (FOPL fragment, no temporal operators)
// ---------------------------------------------------------------------------

enum class BinOp {
  And,
  Or,
  Implies,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  Add,
  Sub,
  Mul,
  Max,
  Min,
  Assign,   // legal-effect rules only: name := expr
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Literal, Var, CtxRef, Not, Binary };

  Kind kind = Kind::Literal;
  Value literal;            // Literal
  std::string name;         // Var (parameter), CtxRef (dimension)
  BinOp op = BinOp::And;    // Binary
  ExprPtr lhs, rhs;         // Not uses lhs only
};

ExprPtr make_literal(Value v);
ExprPtr make_var(std::string name);
ExprPtr make_ctx_ref(std::string dimension);
ExprPtr make_not(ExprPtr e);
ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs);

/// Rendering styles. Spec is the .svc surface syntax (ctx.dim, bare symbols);
/// Model is the generated-automaton syntax (RequesterContext.dim).
enum class RenderStyle { Spec, Model };

std::string render(const Expr& e, RenderStyle style = RenderStyle::Spec);
std::string render(const ExprPtr& e, RenderStyle style = RenderStyle::Spec);

/// Structural equality (canonical-render equality).
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

/// Names referenced by the expression, split by kind.
void collect_vars(const ExprPtr& e, std::set<std::string>& vars,
                  std::set<std::string>& ctx_dims);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct ContextEntry {
  std::string dimension;
  Value tag;
};

/// Aggregated dimension/tag pairs plus the dimension typing map.
struct ContextInfo {
  std::vector<ContextEntry> entries;
  std::map<std::string, DataType> typing;

  const Value* find(const std::string& dimension) const;
};

struct Environment {
  std::map<std::string, Value> bindings;
  ContextInfo requester_context;
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Standard FOPL/arithmetic evaluation. Assign is evaluated as equality.
/// Throws EvalError on unbound names or type mismatches.
Value eval_constraint(const ExprPtr& e, const Environment& env);

/// Convenience: evaluate and require a boolean result.
bool eval_bool(const ExprPtr& e, const Environment& env);

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct ParseError : std::runtime_error {
  ParseError(std::string msg, int line, int col);
  int line, col;
};

/// Parses an infix constraint. Identifiers in `params` become variable
/// references, `ctx.<dim>` becomes a context reference, anything else is a
/// symbol literal (string). `allow_assign` admits a single top-level
/// `name := expr` legal-effect form.
ExprPtr parse_constraint(const std::string& text,
                         const std::set<std::string>& params,
                         bool allow_assign = false);

}  // namespace svc::core
