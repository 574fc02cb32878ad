#include "svc/compose.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace svc::comp {

using core::ConfiguredService;
using core::Context;
using core::ExprPtr;
using core::Parameter;
using core::Price;
using core::ProviderTrust;
using core::Value;

namespace {

constexpr const char* kNameJoin = "&";
constexpr const char* kOneTime = "oneTime";

bool is_numeric_literal(const ExprPtr& e) {
  return e && e->kind == core::Expr::Kind::Literal &&
         (std::holds_alternative<long long>(e->literal) ||
          std::holds_alternative<double>(e->literal));
}

ExprPtr fold_amount(core::BinOp op, const ExprPtr& a, const ExprPtr& b) {
  if (is_numeric_literal(a) && is_numeric_literal(b)) {
    core::Environment env;
    return core::make_literal(
        core::eval_constraint(core::make_binary(op, a, b), env));
  }
  return core::make_binary(op, a, b);
}

}  // namespace

Price combine_price(const Price& a, const Price& b, PricingMode mode) {
  if (a.currency != b.currency)
    throw CompositionError("currency mismatch: " + a.currency + " vs " +
                           b.currency + " (no conversion declared)");
  Price out;
  out.currency = a.currency;

  auto lift = [](const Price& p) -> ExprPtr {
    if (p.unit == kOneTime) return p.amount;
    if (p.usage_param.empty())
      throw CompositionError("cannot reconcile pricing unit '" + p.unit +
                             "' without a usage parameter");
    return core::make_binary(core::BinOp::Mul, p.amount,
                             core::make_var(p.usage_param));
  };

  ExprPtr left = a.amount, right = b.amount;
  if (a.unit == b.unit) {
    out.unit = a.unit;
    out.usage_param = a.usage_param == b.usage_param ? a.usage_param : "";
  } else {
    left = lift(a);
    right = lift(b);
    out.unit = kOneTime;
  }

  switch (mode) {
    case PricingMode::Normal:
      out.amount = fold_amount(core::BinOp::Add, left, right);
      break;
    case PricingMode::Promotional:
      out.amount = fold_amount(core::BinOp::Max, left, right);
      break;
    case PricingMode::SpecialSale:
      out.amount = fold_amount(core::BinOp::Min, left, right);
      break;
  }
  return out;
}

Context merge_context(const Context& a, const Context& b,
                      const PostRulesHook& post_rules_hook,
                      std::vector<std::string>* warnings) {
  Context out;
  std::vector<ExprPtr> a_rules =
      post_rules_hook ? post_rules_hook(a) : a.rules;
  out.rules = core::union_exprs(a_rules, b.rules);

  out.info = a.info;
  for (const auto& [dim, t] : b.info.typing) {
    auto it = out.info.typing.find(dim);
    if (it != out.info.typing.end() && it->second.kind != t.kind)
      throw CompositionError("incompatible types on shared context dimension '" +
                             dim + "'");
    out.info.typing[dim] = t;
  }
  for (const auto& e : b.info.entries) {
    bool found = false;
    for (auto& existing : out.info.entries) {
      if (existing.dimension != e.dimension) continue;
      found = true;
      if (!(existing.tag == e.tag)) {
        if (warnings)
          warnings->push_back("context dimension '" + e.dimension +
                              "': tag " + core::render_value(existing.tag) +
                              " superseded by " + core::render_value(e.tag));
        existing.tag = e.tag;
      }
    }
    if (!found) out.info.entries.push_back(e);
  }
  return out;
}

ProviderTrust aggregate_trust(const ProviderTrust& a, const ProviderTrust& b,
                              const SeqOptions& opts) {
  if (opts.trust_logic == TrustLogic::Packaged) {
    if (!opts.packaged_trust)
      throw CompositionError(
          "packaged trust logic requires externally supplied ce/re sets");
    ProviderTrust out = *opts.packaged_trust;
    out.lowest_price = a.lowest_price && b.lowest_price;
    return out;
  }

  std::mt19937 rng(opts.choose_seed);
  auto combine_grades = [&](int g1, int g2) -> int {
    switch (opts.trust_aggregator) {
      case TrustAggregator::Glb: return std::min(g1, g2);
      case TrustAggregator::Lub: return std::max(g1, g2);
      case TrustAggregator::Avg: return (g1 + g2) / 2;
      case TrustAggregator::Choose:
        return std::uniform_int_distribution<int>(0, 1)(rng) ? g1 : g2;
    }
    return g1;
  };

  using Recs = std::vector<std::pair<std::string, int>>;
  auto merge = [&](const Recs& ra, const Recs& rb) -> Recs {
    std::map<std::string, int> ma(ra.begin(), ra.end());
    std::map<std::string, int> mb(rb.begin(), rb.end());
    std::map<std::string, int> result;
    for (const auto& [name, ga] : ma) {
      auto it = mb.find(name);
      if (it != mb.end())
        result[name] = combine_grades(ga, it->second);  // shared names
      else if (opts.trust_logic == TrustLogic::ALeadsToB)
        result[name] = ga;  // A \ B
    }
    if (opts.trust_logic == TrustLogic::BRequiresA)
      for (const auto& [name, gb] : mb)
        if (!ma.count(name)) result[name] = gb;  // B \ A
    return Recs(result.begin(), result.end());
  };

  ProviderTrust out;
  out.client_recs = merge(a.client_recs, b.client_recs);
  out.org_recs = merge(a.org_recs, b.org_recs);
  out.lowest_price = a.lowest_price && b.lowest_price;
  return out;
}

namespace {

template <typename T>
std::optional<T> opt_sum(const std::optional<T>& a, const std::optional<T>& b) {
  if (a && b) return *a + *b;
  return a ? a : b;
}

template <typename T>
std::optional<T> opt_min(const std::optional<T>& a, const std::optional<T>& b) {
  if (a && b) return std::min(*a, *b);
  return a ? a : b;
}

std::vector<std::string> union_names(const std::vector<std::string>& a,
                                     const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  for (const auto& n : b)
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  return out;
}

}  // namespace

ConfiguredService seq_compose(const ConfiguredService& a,
                              const ConfiguredService& b,
                              const SeqOptions& opts,
                              std::vector<std::string>* warnings) {
  ConfiguredService out;
  out.name = a.name + kNameJoin + b.name;

  // Parameters: union by name. A parameter that is an output on either side
  // stays an output (sequential inputs exclude A's outputs).
  out.params = a.params;
  for (const auto& pb : b.params) {
    bool merged = false;
    for (auto& pa : out.params) {
      if (pa.name != pb.name) continue;
      merged = true;
      if (pb.direction == Parameter::Direction::Output)
        pa.direction = Parameter::Direction::Output;
    }
    if (!merged) out.params.push_back(pb);
  }

  out.attrs = a.attrs;
  for (const auto& ab : b.attrs) {
    bool present = false;
    for (const auto& aa : out.attrs) present = present || aa.name == ab.name;
    if (!present) out.attrs.push_back(ab);
  }

  out.context = merge_context(a.context, b.context, nullptr, warnings);

  const auto& fa = a.contract.function;
  const auto& fb = b.contract.function;
  auto& f = out.contract.function;
  f.name = fa.name + kNameJoin + fb.name;
  f.result_name = fa.result_name + kNameJoin + fb.result_name;
  f.addresses = fa.addresses;
  f.addresses.insert(f.addresses.end(), fb.addresses.begin(), fb.addresses.end());

  std::vector<std::string> a_outputs = fa.outputs;
  std::vector<std::string> b_new_inputs;
  for (const auto& n : fb.inputs)
    if (std::find(a_outputs.begin(), a_outputs.end(), n) == a_outputs.end())
      b_new_inputs.push_back(n);
  f.inputs = union_names(fa.inputs, b_new_inputs);
  f.outputs = union_names(fa.outputs, fb.outputs);

  bool po_a_observable = opts.po_a_observable && fa.post_observable;
  f.pre = opts.b_requires_more
              ? core::union_exprs(fa.pre, core::minus_exprs(fb.pre, fa.post))
              : fa.pre;
  f.post = po_a_observable ? core::union_exprs(fa.post, fb.post) : fb.post;
  f.post_observable = fb.post_observable;

  const auto& na = a.contract.nonfunctional;
  const auto& nb = b.contract.nonfunctional;
  auto& nf = out.contract.nonfunctional;
  nf.safety_time = opt_sum(na.safety_time, nb.safety_time);
  nf.safety_data = core::union_exprs(na.safety_data, nb.safety_data);
  nf.security = union_names(na.security, nb.security);
  nf.availability = opt_sum(na.availability, nb.availability);
  nf.reliability = opt_min(na.reliability, nb.reliability);
  if (na.price && nb.price)
    nf.price = combine_price(*na.price, *nb.price, opts.pricing_mode);
  else
    nf.price = na.price ? na.price : nb.price;
  if (na.trust && nb.trust)
    nf.trust = aggregate_trust(*na.trust, *nb.trust, opts);
  else
    nf.trust = na.trust ? na.trust : nb.trust;

  out.contract.legal = core::union_exprs(a.contract.legal, b.contract.legal);
  // Only check-form rules constrain anything; assign-form rules are effects
  // that accumulate and cannot contradict each other.
  std::vector<core::ExprPtr> legal_checks;
  for (const auto& l : out.contract.legal)
    if (!(l->kind == core::Expr::Kind::Binary && l->op == core::BinOp::Assign))
      legal_checks.push_back(l);
  if (!legal_checks.empty() &&
      !core::satisfiable_over_mentioned_constants(legal_checks).satisfiable)
    throw CompositionError("composition conflict: combined legal rules of " +
                           a.name + " and " + b.name + " are unsatisfiable");
  return out;
}

ConfiguredService compose_along_flow(const flat::Flow& flow,
                                     const core::Catalog& catalog,
                                     const SeqOptions& opts,
                                     std::vector<std::string>* warnings) {
  if (flow.steps.empty()) throw CompositionError("empty flow");
  auto lookup = [&](const std::string& name) -> const ConfiguredService& {
    auto it = catalog.find(name);
    if (it == catalog.end())
      throw CompositionError("unknown service '" + name + "'");
    return it->second;
  };

  ConfiguredService acc = lookup(flow.steps.front().service);
  for (size_t i = 1; i < flow.steps.size(); ++i)
    acc = seq_compose(acc, lookup(flow.steps[i].service), opts, warnings);

  // Guard lifting: conditional and iteration guards become preconditions.
  for (const auto& step : flow.steps)
    acc.contract.function.pre =
        core::union_exprs(acc.contract.function.pre, step.guards);
  return acc;
}

std::vector<std::string> leaf_services(const CompPtr& expr) {
  std::vector<std::string> out;
  std::function<void(const CompPtr&)> walk = [&](const CompPtr& e) {
    if (!e) return;
    if (e->kind == CompositionExpr::Kind::Service) {
      if (std::find(out.begin(), out.end(), e->service) == out.end())
        out.push_back(e->service);
      return;
    }
    walk(e->left);
    walk(e->right);
  };
  walk(expr);
  return out;
}

namespace {

// Evaluates a price amount under the composition bindings; services without
// a price contribute zero.
double flow_price_value(const ConfiguredService& s, const ComposeOptions& opts) {
  const auto& price = s.contract.nonfunctional.price;
  if (!price) return 0.0;
  core::Environment env;
  env.bindings = opts.bindings;
  env.requester_context = opts.requester;
  try {
    Value v = core::eval_constraint(price->amount, env);
    if (const auto* i = std::get_if<long long>(&v)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    throw CompositionError("price amount did not evaluate to a number");
  } catch (const core::EvalError& e) {
    throw CompositionError(std::string("cannot evaluate price amount: ") +
                           e.what());
  }
}

}  // namespace

CompositionResult compose(const CompPtr& expr, const core::Catalog& catalog,
                          const ComposeOptions& opts) {
  CompositionResult result;
  result.flow_expr = expr;
  result.services = leaf_services(expr);

  std::vector<flat::Flow> flows = flat::flatten(expr, opts.unroll);
  if (flows.empty()) throw CompositionError("expression denotes no flows");

  for (const auto& flow : flows)
    result.per_flow.emplace_back(
        flow, compose_along_flow(flow, catalog, opts, &result.warnings));

  // Worst case across flows. Union fields accumulate; numeric bounds take
  // the dominating direction; the price is the costliest flow's price under
  // the supplied bindings.
  ConfiguredService composite = result.per_flow.front().second;
  // A single flow needs no price comparison, so bindings may stay abstract.
  double best_price = result.per_flow.size() > 1
                          ? flow_price_value(composite, opts)
                          : 0.0;
  for (size_t i = 1; i < result.per_flow.size(); ++i) {
    const ConfiguredService& fc = result.per_flow[i].second;
    composite.params = [&] {
      auto params = composite.params;
      for (const auto& p : fc.params) {
        bool present = false;
        for (auto& q : params) {
          if (q.name != p.name) continue;
          present = true;
          if (p.direction == Parameter::Direction::Output)
            q.direction = Parameter::Direction::Output;
        }
        if (!present) params.push_back(p);
      }
      return params;
    }();
    for (const auto& a : fc.attrs) {
      bool present = false;
      for (const auto& x : composite.attrs) present = present || x.name == a.name;
      if (!present) composite.attrs.push_back(a);
    }
    composite.context =
        merge_context(composite.context, fc.context, nullptr, &result.warnings);
    composite.contract.legal =
        core::union_exprs(composite.contract.legal, fc.contract.legal);

    auto& nf = composite.contract.nonfunctional;
    const auto& onf = fc.contract.nonfunctional;
    nf.safety_data = core::union_exprs(nf.safety_data, onf.safety_data);
    nf.security = union_names(nf.security, onf.security);
    if (onf.safety_time)
      nf.safety_time = std::max(nf.safety_time.value_or(0), *onf.safety_time);
    if (onf.availability)
      nf.availability = std::max(nf.availability.value_or(0), *onf.availability);
    nf.reliability = opt_min(nf.reliability, onf.reliability);

    double p = flow_price_value(fc, opts);
    if (p > best_price) {
      best_price = p;
      nf.price = onf.price;
    }

    auto& f = composite.contract.function;
    const auto& of = fc.contract.function;
    f.inputs = union_names(f.inputs, of.inputs);
    f.outputs = union_names(f.outputs, of.outputs);
    f.post = core::union_exprs(f.post, of.post);
    f.pre = core::union_exprs(f.pre, of.pre);
  }

  result.composite = std::move(composite);
  return result;
}

}  // namespace svc::comp
