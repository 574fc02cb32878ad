#include "svc/model.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace svc::core {

const Parameter* ConfiguredService::find_param(const std::string& pname) const {
  for (const auto& p : params)
    if (p.name == pname) return &p;
  return nullptr;
}

std::vector<std::string> ConfiguredService::input_names() const {
  std::vector<std::string> out;
  for (const auto& p : params)
    if (p.direction == Parameter::Direction::Input) out.push_back(p.name);
  return out;
}

std::vector<std::string> ConfiguredService::output_names() const {
  std::vector<std::string> out;
  for (const auto& p : params)
    if (p.direction == Parameter::Direction::Output) out.push_back(p.name);
  return out;
}

// ---------------------------------------------------------------------------
// Expression-set helpers
// ---------------------------------------------------------------------------

bool contains_expr(const std::vector<ExprPtr>& set, const ExprPtr& e) {
  for (const auto& x : set)
    if (expr_equal(x, e)) return true;
  return false;
}

std::vector<ExprPtr> union_exprs(const std::vector<ExprPtr>& a,
                                 const std::vector<ExprPtr>& b) {
  std::vector<ExprPtr> out = a;
  for (const auto& e : b)
    if (!contains_expr(out, e)) out.push_back(e);
  return out;
}

std::vector<ExprPtr> minus_exprs(const std::vector<ExprPtr>& a,
                                 const std::vector<ExprPtr>& b) {
  std::vector<ExprPtr> out;
  for (const auto& e : a)
    if (!contains_expr(b, e)) out.push_back(e);
  return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

void check_enum_type(const DataType& t, const std::string& where,
                     std::vector<Violation>& out) {
  if (t.kind != TypeKind::Enum) return;
  if (t.enum_values.empty())
    out.push_back({where, "enum '" + t.enum_name + "' has an empty value list"});
  std::set<std::string> seen;
  for (const auto& v : t.enum_values)
    if (!seen.insert(v).second)
      out.push_back({where, "enum '" + t.enum_name + "' duplicates value '" + v + "'"});
}

void check_refs_resolve(const ExprPtr& e, const ConfiguredService& s,
                        const std::string& where, std::vector<Violation>& out) {
  std::set<std::string> vars, dims;
  collect_vars(e, vars, dims);
  for (const auto& v : vars)
    if (!s.find_param(v))
      out.push_back({where, "reference to undeclared parameter '" + v + "'"});
}

}  // namespace

std::vector<Violation> validate_service(const ConfiguredService& s) {
  std::vector<Violation> out;

  // Parameter names unique; constraints reference only their own parameter.
  std::set<std::string> names;
  for (const auto& p : s.params) {
    if (!names.insert(p.name).second)
      out.push_back({"parameters", "duplicate parameter name '" + p.name + "'"});
    check_enum_type(p.dtype, "parameter " + p.name, out);
    if (p.constraint) {
      std::set<std::string> vars, dims;
      collect_vars(p.constraint, vars, dims);
      for (const auto& v : vars)
        if (v != p.name)
          out.push_back({"parameter " + p.name,
                         "constraint references other parameter '" + v + "'"});
    }
  }

  for (const auto& a : s.attrs) {
    check_enum_type(a.dtype, "attribute " + a.name, out);
    if (!value_conforms(a.value, a.dtype))
      out.push_back({"attribute " + a.name,
                     "value " + render_value(a.value) + " does not conform to " +
                         type_name(a.dtype)});
  }

  // Context info: one tag per dimension, tags conform to the typing.
  std::set<std::string> dims_seen;
  for (const auto& e : s.context.info.entries) {
    if (!dims_seen.insert(e.dimension).second)
      out.push_back({"context", "dimension '" + e.dimension + "' appears twice"});
    auto it = s.context.info.typing.find(e.dimension);
    if (it != s.context.info.typing.end() && !value_conforms(e.tag, it->second))
      out.push_back({"context",
                     "tag " + render_value(e.tag) + " does not conform to type of '" +
                         e.dimension + "'"});
  }

  const auto& f = s.contract.function;
  auto check_param_list = [&](const std::vector<std::string>& list,
                              Parameter::Direction dir, const std::string& where) {
    for (const auto& n : list) {
      const Parameter* p = s.find_param(n);
      if (!p)
        out.push_back({where, "undeclared parameter '" + n + "'"});
      else if (p->direction != dir)
        out.push_back({where, "parameter '" + n + "' has the wrong direction"});
    }
  };
  check_param_list(f.inputs, Parameter::Direction::Input, "function inputs");
  check_param_list(f.outputs, Parameter::Direction::Output, "function outputs");
  for (const auto& e : f.pre) check_refs_resolve(e, s, "precondition", out);
  for (const auto& e : f.post) check_refs_resolve(e, s, "postcondition", out);
  for (const auto& e : s.contract.legal) check_refs_resolve(e, s, "legal", out);
  for (const auto& e : s.contract.nonfunctional.safety_data)
    check_refs_resolve(e, s, "safety_data", out);

  const auto& nf = s.contract.nonfunctional;
  if (nf.safety_time && *nf.safety_time < 0)
    out.push_back({"nonfunctional", "safety_time is negative"});
  if (nf.reliability && *nf.reliability < 0)
    out.push_back({"nonfunctional", "reliability is negative"});
  if (nf.availability && *nf.availability < 0)
    out.push_back({"nonfunctional", "availability is negative"});
  if (nf.trust) {
    auto check_grades = [&](const std::vector<std::pair<std::string, int>>& recs,
                            const char* which) {
      std::set<std::string> rec_names;
      for (const auto& [who, grade] : recs) {
        if (grade < 1 || grade > 5)
          out.push_back({std::string("trust ") + which,
                         "grade " + std::to_string(grade) + " for '" + who +
                             "' outside 1..5"});
        if (!rec_names.insert(who).second)
          out.push_back({std::string("trust ") + which,
                         "duplicate recommendation for '" + who + "'"});
      }
    };
    check_grades(nf.trust->client_recs, "ce");
    check_grades(nf.trust->org_recs, "re");
  }

  // "no two rules can conflict": legal and context-rule sets must be jointly
  // satisfiable over the finite domains their constants induce.
  if (!s.contract.legal.empty()) {
    SatResult r = satisfiable_over_mentioned_constants(s.contract.legal);
    if (!r.satisfiable)
      out.push_back({"legal", "legal rules are jointly unsatisfiable"});
  }
  if (!s.context.rules.empty()) {
    SatResult r = satisfiable_over_mentioned_constants(s.context.rules);
    if (!r.satisfiable)
      out.push_back({"context", "context rules are jointly unsatisfiable"});
  }

  return out;
}

// ---------------------------------------------------------------------------
// Context rules
// ---------------------------------------------------------------------------

ContextCheck context_rules_hold(const Context& ctx, const ContextInfo& requester) {
  ContextCheck result;
  result.holds = true;
  Environment env;
  env.requester_context = requester;
  for (const auto& rule : ctx.rules) {
    try {
      if (!eval_bool(rule, env)) {
        result.holds = false;
        result.diagnostics.push_back("rule not satisfied: " + render(rule));
      }
    } catch (const EvalError& err) {
      result.holds = false;
      result.diagnostics.push_back("rule " + render(rule) + ": " + err.what());
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Finite-domain satisfiability
// ---------------------------------------------------------------------------

SatResult constraints_jointly_satisfiable(
    const std::vector<ExprPtr>& constraints,
    const std::map<std::string, std::vector<Value>>& domains) {
  std::set<std::string> vars, dims;
  for (const auto& c : constraints) collect_vars(c, vars, dims);
  // Context references range over the same declared domains as variables here.
  for (const auto& d : dims) vars.insert(d);

  std::vector<std::string> order;
  for (const auto& v : vars) {
    auto it = domains.find(v);
    if (it == domains.end() || it->second.empty())
      throw EvalError("no finite domain declared for '" + v + "'");
    order.push_back(v);
  }

  SatResult result;
  std::vector<size_t> idx(order.size(), 0);
  for (;;) {
    Environment env;
    for (size_t i = 0; i < order.size(); ++i) {
      const Value& v = domains.at(order[i])[idx[i]];
      env.bindings[order[i]] = v;
      env.requester_context.entries.push_back({order[i], v});
    }
    bool all = true;
    for (const auto& c : constraints) {
      try {
        if (!eval_bool(c, env)) {
          all = false;
          break;
        }
      } catch (const EvalError&) {
        all = false;
        break;
      }
    }
    if (all) {
      result.satisfiable = true;
      for (size_t i = 0; i < order.size(); ++i)
        result.witness[order[i]] = domains.at(order[i])[idx[i]];
      return result;
    }
    // Odometer increment; empty variable list means one (empty) row.
    size_t k = 0;
    for (; k < order.size(); ++k) {
      if (++idx[k] < domains.at(order[k]).size()) break;
      idx[k] = 0;
    }
    if (k == order.size()) {
      if (order.empty()) result.satisfiable = true;  // vacuous conjunction
      return result;
    }
  }
}

SatResult satisfiable_over_mentioned_constants(
    const std::vector<ExprPtr>& constraints) {
  std::set<std::string> vars, dims;
  for (const auto& c : constraints) collect_vars(c, vars, dims);
  for (const auto& d : dims) vars.insert(d);

  // Every constant mentioned anywhere is a candidate value for every
  // variable; numeric constants also contribute their +/-1 neighbours so
  // strict comparisons have room.
  std::vector<Value> constants;
  auto add = [&](const Value& v) {
    for (const auto& c : constants)
      if (c == v) return;
    constants.push_back(v);
  };
  std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& e) {
    if (!e) return;
    if (e->kind == Expr::Kind::Literal) {
      add(e->literal);
      if (const auto* i = std::get_if<long long>(&e->literal)) {
        add(*i - 1);
        add(*i + 1);
      }
      if (const auto* d = std::get_if<double>(&e->literal)) {
        add(*d - 1);
        add(*d + 1);
      }
    }
    walk(e->lhs);
    walk(e->rhs);
  };
  for (const auto& c : constraints) walk(c);
  add(true);
  add(false);

  std::map<std::string, std::vector<Value>> domains;
  for (const auto& v : vars) domains[v] = constants;
  return constraints_jointly_satisfiable(constraints, domains);
}

}  // namespace svc::core
