#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "svc/flatten.hpp"
#include "svc/spec_io.hpp"

namespace svc::comp {

enum class PricingMode { Normal, Promotional, SpecialSale };
enum class TrustLogic { BRequiresA, ALeadsToB, Packaged };
enum class TrustAggregator { Avg, Choose, Glb, Lub };

struct SeqOptions {
  PricingMode pricing_mode = PricingMode::Normal;
  TrustLogic trust_logic = TrustLogic::BRequiresA;
  TrustAggregator trust_aggregator = TrustAggregator::Glb;
  bool po_a_observable = true;
  bool b_requires_more = true;
  unsigned choose_seed = 0;  // reproducibility for the choose aggregator
  // Packaged business logic needs externally collected recommendation sets.
  std::optional<core::ProviderTrust> packaged_trust;
};

struct ComposeOptions : SeqOptions {
  int unroll = 1;
  // Bindings and requester context used to compare flow prices and embed
  // initial values into generated models.
  std::map<std::string, core::Value> bindings;
  core::ContextInfo requester;
};

struct CompositionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CompositionResult {
  std::vector<std::string> services;  // leaf services in expression order
  CompPtr flow_expr;
  core::ConfiguredService composite;  // worst-case bounds across flows
  std::vector<std::pair<flat::Flow, core::ConfiguredService>> per_flow;
  std::vector<std::string> warnings;
};

/// Full sequential-composition semantics: parameter/attribute/context
/// merging, contract function rules, nonfunctional aggregation, price and
/// trust combination, legal-issue union.
core::ConfiguredService seq_compose(const core::ConfiguredService& a,
                                    const core::ConfiguredService& b,
                                    const SeqOptions& opts,
                                    std::vector<std::string>* warnings = nullptr);

using PostRulesHook =
    std::function<std::vector<core::ExprPtr>(const core::Context&)>;

/// Context merge: rules' union (A's rules passed through the hook, default
/// identity) and dimension-wise info union. On a shared dimension with
/// differing tags B's tag wins and a warning is recorded.
core::Context merge_context(const core::Context& a, const core::Context& b,
                            const PostRulesHook& post_rules_hook = nullptr,
                            std::vector<std::string>* warnings = nullptr);

/// Trust aggregation over the grade lattice, per business logic and
/// aggregator choice.
core::ProviderTrust aggregate_trust(const core::ProviderTrust& a,
                                    const core::ProviderTrust& b,
                                    const SeqOptions& opts);

/// Price combination: sum / max / min of amounts per pricing mode, with
/// unit reconciliation (operands of differing units are lifted to oneTime
/// expressions over their usage parameter).
core::Price combine_price(const core::Price& a, const core::Price& b,
                          PricingMode mode);

/// Left fold of seq_compose over a flow's services; step guards become
/// preconditions of the composite.
core::ConfiguredService compose_along_flow(const flat::Flow& flow,
                                           const core::Catalog& catalog,
                                           const SeqOptions& opts,
                                           std::vector<std::string>* warnings = nullptr);

/// Flattens, composes each flow, and aggregates the worst case across flows
/// (price, safety time and availability maxima; reliability minimum; unions
/// of the observable-data fields).
CompositionResult compose(const CompPtr& expr, const core::Catalog& catalog,
                          const ComposeOptions& opts);

/// Leaf service names in expression order (duplicates removed).
std::vector<std::string> leaf_services(const CompPtr& expr);

}  // namespace svc::comp
