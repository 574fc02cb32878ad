#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svc/expr.hpp"

namespace svc::core {

// ConfiguredService = <parameters, attributes, context, contract>.

struct Parameter {
  enum class Direction { Input, Output };
  std::string name;
  DataType dtype;
  Direction direction = Direction::Input;
  ExprPtr constraint;  // null means unconstrained (true)
};

struct Attribute {
  std::string name;
  DataType dtype;
  Value value;
};

struct Context {
  std::vector<ExprPtr> rules;  // over requester context (ctx.<dim> references)
  ContextInfo info;
};

struct ServiceFunction {
  std::string name;
  std::vector<std::string> inputs;     // subset of input parameter names
  std::vector<std::string> addresses;  // one per leaf service
  std::string result_name;
  std::vector<std::string> outputs;    // subset of output parameter names
  std::vector<ExprPtr> pre;
  std::vector<ExprPtr> post;
  bool post_observable = true;
  // Synchronization channel names used in the generated automata. Empty
  // means derive from the function name (<name>Req / <name>Rsp).
  std::string request_channel;
  std::string response_channel;
};

struct Price {
  ExprPtr amount;          // arithmetic expression, constants the usual case
  std::string currency;    // e.g. dollar
  std::string unit;        // e.g. hour, oneTime
  std::string usage_param; // parameter the per-unit amount multiplies under
                           // unit mixing; empty if not applicable
};

struct TrustGrade {
  int value = 1;  // 1=Low .. 5=High; a finite total order, hence a lattice
};

struct ProviderTrust {
  std::vector<std::pair<std::string, int>> client_recs;  // ce
  bool lowest_price = false;                             // pg
  std::vector<std::pair<std::string, int>> org_recs;     // re
};

struct Nonfunctional {
  std::optional<long long> safety_time;   // rho_t, abstract time units
  std::vector<ExprPtr> safety_data;       // rho_d
  std::vector<std::string> security;      // epsilon, opaque protocol names
  std::optional<long long> reliability;   // psi, max time between failures
  std::optional<long long> availability;  // eta, max time for repairs
  std::optional<Price> price;
  std::optional<ProviderTrust> trust;
};

struct Contract {
  ServiceFunction function;
  Nonfunctional nonfunctional;
  std::vector<ExprPtr> legal;  // checks (==) and effects (:=)
};

struct ConfiguredService {
  std::string name;  // catalog name
  std::vector<Parameter> params;
  std::vector<Attribute> attrs;
  Context context;
  Contract contract;

  const Parameter* find_param(const std::string& name) const;
  std::vector<std::string> input_names() const;
  std::vector<std::string> output_names() const;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  std::string where;    // which invariant / which element
  std::string message;
};

/// Checks every structural invariant of the model plus finite-domain
/// satisfiability of the legal set and the context rules. Violations are
/// data, not failures.
std::vector<Violation> validate_service(const ConfiguredService& s);

// ---------------------------------------------------------------------------
// Context rules
// ---------------------------------------------------------------------------

struct ContextCheck {
  bool holds = false;
  std::vector<std::string> diagnostics;  // absent dimensions etc.
};

/// True iff every rule evaluates true against the requester context.
/// A rule referencing an absent dimension is non-satisfaction (with a
/// diagnostic), not a crash.
ContextCheck context_rules_hold(const Context& ctx, const ContextInfo& requester);

// ---------------------------------------------------------------------------
// Finite-domain satisfiability
// ---------------------------------------------------------------------------

struct SatResult {
  bool satisfiable = false;
  std::map<std::string, Value> witness;  // a satisfying assignment if any
};

/// Exhaustive enumeration over the cross product of the declared domains.
/// Throws EvalError when a referenced name has no declared domain.
SatResult constraints_jointly_satisfiable(
    const std::vector<ExprPtr>& constraints,
    const std::map<std::string, std::vector<Value>>& domains);

/// Derives per-name finite domains from the constants mentioned in the
/// constraint set (numeric constants also contribute +/-1 neighbours,
/// booleans contribute both values) and runs the enumeration.
SatResult satisfiable_over_mentioned_constants(
    const std::vector<ExprPtr>& constraints);

// Set-of-expression helpers used throughout composition (structural identity).
bool contains_expr(const std::vector<ExprPtr>& set, const ExprPtr& e);
std::vector<ExprPtr> union_exprs(const std::vector<ExprPtr>& a,
                                 const std::vector<ExprPtr>& b);
std::vector<ExprPtr> minus_exprs(const std::vector<ExprPtr>& a,
                                 const std::vector<ExprPtr>& b);

}  // namespace svc::core
