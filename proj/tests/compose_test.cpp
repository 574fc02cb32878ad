#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "svc/compose.hpp"

using namespace svc;
using core::ConfiguredService;

namespace {

core::Catalog load(const std::string& name) {
  std::ifstream in(std::string(FIXTURES_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return core::parse_catalog(ss.str());
}

std::vector<std::string> names(const std::vector<std::string>& v) { return v; }

ConfiguredService priced_service(const std::string& name, long long amount,
                                 const std::string& unit,
                                 const std::string& usage = "") {
  ConfiguredService s;
  s.name = name;
  s.contract.function.name = "Do" + name;
  core::Price p;
  p.amount = core::make_literal(amount);
  p.currency = "dollar";
  p.unit = unit;
  p.usage_param = usage;
  s.contract.nonfunctional.price = p;
  return s;
}

}  // namespace

TEST_CASE("sequential composition reproduces the repair-shop/tow-truck pair") {
  auto cat = load("worked_pair.svc");
  auto c = comp::seq_compose(cat.at("rs"), cat.at("tt"), comp::SeqOptions{});

  const auto& f = c.contract.function;
  CHECK(f.name == "ReserveRS&ReserveTT");
  CHECK(f.addresses == std::vector<std::string>{"XXX", "YYY"});
  CHECK(names(f.inputs) == std::vector<std::string>{"CarBroken", "deposit",
                                                    "CarType", "failureType",
                                                    "RequestTruck"});
  CHECK(f.result_name == "ResultRS&ResultTT");
  CHECK(names(f.outputs) == std::vector<std::string>{
                                "HasAppointment", "numberOfHours", "RequestConfi"});

  auto rendered = [](const std::vector<core::ExprPtr>& es) {
    std::vector<std::string> out;
    for (const auto& e : es) out.push_back(core::render(e));
    return out;
  };
  CHECK(rendered(f.pre) ==
        std::vector<std::string>{"CarBroken==true", "RequestTruck==true"});
  CHECK(rendered(f.post) ==
        std::vector<std::string>{"HasAppointment==true", "RequestConfi==true"});
  CHECK(rendered(c.contract.legal) ==
        std::vector<std::string>{"deposit := 300", "CarType==toyota"});
  REQUIRE(c.context.rules.size() == 1);
  CHECK(core::render(c.context.rules[0]) == "ctx.membership==caa");
  REQUIRE(c.context.info.entries.size() == 1);
  CHECK(c.context.info.entries[0].dimension == "Location");

  const auto& p = c.contract.nonfunctional.price;
  REQUIRE(p.has_value());
  CHECK(core::render(p->amount) == "(60*numberOfHours)+100");
  CHECK(p->currency == "dollar");
  CHECK(p->unit == "oneTime");
}

TEST_CASE("input parameters of the second service vanish when produced by the first") {
  auto cat = load("worked_pair.svc");
  ConfiguredService a = cat.at("rs");
  ConfiguredService b = cat.at("tt");
  // make tt consume rs's output
  b.params[0].name = "HasAppointment";
  b.contract.function.inputs = {"HasAppointment"};
  auto c = comp::seq_compose(a, b, comp::SeqOptions{});
  for (const auto& in : c.contract.function.inputs)
    CHECK(in != "HasAppointment");
}

TEST_CASE("price combination follows the pricing mode") {
  core::Price a = *priced_service("A", 100, "oneTime").contract.nonfunctional.price;
  core::Price b = *priced_service("B", 60, "oneTime").contract.nonfunctional.price;
  auto amt = [](const core::Price& p) {
    return std::get<long long>(core::eval_constraint(p.amount, {}));
  };
  CHECK(amt(comp::combine_price(a, b, comp::PricingMode::Normal)) == 160);
  CHECK(amt(comp::combine_price(a, b, comp::PricingMode::Promotional)) == 100);
  CHECK(amt(comp::combine_price(a, b, comp::PricingMode::SpecialSale)) == 60);
}

TEST_CASE("price combination lifts mixed units over the usage parameter") {
  core::Price hourly =
      *priced_service("A", 60, "hour", "n").contract.nonfunctional.price;
  core::Price once = *priced_service("B", 100, "oneTime").contract.nonfunctional.price;
  auto c = comp::combine_price(hourly, once, comp::PricingMode::Normal);
  CHECK(core::render(c.amount) == "(60*n)+100");
  CHECK(c.unit == "oneTime");

  core::Price euros = once;
  euros.currency = "euro";
  CHECK_THROWS_AS(comp::combine_price(hourly, euros, comp::PricingMode::Normal),
                  comp::CompositionError);
}

TEST_CASE("trust aggregation respects the lattice and the business logic") {
  core::ProviderTrust a, b;
  a.client_recs = {{"alice", 4}, {"bob", 2}};
  a.lowest_price = true;
  b.client_recs = {{"alice", 5}, {"carol", 3}};
  b.lowest_price = false;

  comp::SeqOptions opts;
  opts.trust_logic = comp::TrustLogic::BRequiresA;
  opts.trust_aggregator = comp::TrustAggregator::Glb;
  auto t = comp::aggregate_trust(a, b, opts);
  // shared: glb(4,5)=4; plus B-only carol
  REQUIRE(t.client_recs.size() == 2);
  CHECK(t.client_recs[0] == std::pair<std::string, int>{"alice", 4});
  CHECK(t.client_recs[1] == std::pair<std::string, int>{"carol", 3});
  CHECK_FALSE(t.lowest_price);  // conjunction

  opts.trust_logic = comp::TrustLogic::ALeadsToB;
  opts.trust_aggregator = comp::TrustAggregator::Lub;
  t = comp::aggregate_trust(a, b, opts);
  REQUIRE(t.client_recs.size() == 2);
  CHECK(t.client_recs[0] == std::pair<std::string, int>{"alice", 5});
  CHECK(t.client_recs[1] == std::pair<std::string, int>{"bob", 2});

  opts.trust_aggregator = comp::TrustAggregator::Avg;
  t = comp::aggregate_trust(a, b, opts);
  CHECK(t.client_recs[0].second == 4);  // (4+5)/2 rounded down

  // lattice laws over grades 1..5
  for (int x = 1; x <= 5; ++x)
    for (int y = 1; y <= 5; ++y) {
      CHECK(std::min(x, y) <= (x + y) / 2);
      CHECK((x + y) / 2 <= std::max(x, y));
      CHECK(std::min(x, y) == std::min(y, x));
      CHECK(std::max(x, x) == x);
    }

  // choose is deterministic under a fixed seed
  opts.trust_aggregator = comp::TrustAggregator::Choose;
  opts.choose_seed = 42;
  auto t1 = comp::aggregate_trust(a, b, opts);
  auto t2 = comp::aggregate_trust(a, b, opts);
  CHECK(t1.client_recs == t2.client_recs);
  int g = t1.client_recs[0].second;
  CHECK((g == 4 || g == 5));

  opts.trust_logic = comp::TrustLogic::Packaged;
  CHECK_THROWS_AS(comp::aggregate_trust(a, b, opts), comp::CompositionError);
  core::ProviderTrust fresh;
  fresh.client_recs = {{"dora", 1}};
  opts.packaged_trust = fresh;
  t = comp::aggregate_trust(a, b, opts);
  CHECK(t.client_recs == fresh.client_recs);
}

TEST_CASE("context merge unions info with second-service tags winning") {
  core::Context a, b;
  a.rules.push_back(core::parse_constraint("ctx.age >= 21", {}));
  a.info.entries = {{"Location", std::string("Montreal")}};
  b.info.entries = {{"Location", std::string("Toronto")}, {"Tier", 2LL}};
  std::vector<std::string> warnings;
  auto m = comp::merge_context(a, b, nullptr, &warnings);
  REQUIRE(m.info.entries.size() == 2);
  CHECK(std::get<std::string>(*m.info.find("Location")) == "Toronto");
  CHECK(std::get<long long>(*m.info.find("Tier")) == 2);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("Location") != std::string::npos);
}

TEST_CASE("precondition and postcondition rules react to the options") {
  auto cat = load("worked_pair.svc");
  const auto& a = cat.at("rs");
  const auto& b = cat.at("tt");

  comp::SeqOptions opts;
  opts.b_requires_more = false;
  auto c = comp::seq_compose(a, b, opts);
  CHECK(c.contract.function.pre.size() == 1);  // pr_A only

  opts = comp::SeqOptions{};
  opts.po_a_observable = false;
  c = comp::seq_compose(a, b, opts);
  REQUIRE(c.contract.function.post.size() == 1);  // po_B only
  CHECK(core::render(c.contract.function.post[0]) == "RequestConfi==true");
}

TEST_CASE("conflicting legal checks abort the composition") {
  auto cat = load("worked_pair.svc");
  ConfiguredService a = cat.at("rs");
  ConfiguredService b = cat.at("tt");
  b.params.push_back({"CarType", core::DataType::simple(core::TypeKind::String),
                      core::Parameter::Direction::Input, nullptr});
  b.contract.legal.push_back(
      core::parse_constraint("CarType == honda", {"CarType"}));
  CHECK_THROWS_WITH_AS(comp::seq_compose(a, b, comp::SeqOptions{}),
                       doctest::Contains("conflict"), comp::CompositionError);
}

TEST_CASE("composing a single service is the identity") {
  auto cat = load("roadside.svc");
  comp::ComposeOptions opts;
  auto r = comp::compose(comp::parse_composition_expr("RepairShop", cat), cat,
                         opts);
  CHECK(core::service_equal(r.composite, cat.at("RepairShop")));
  CHECK(r.per_flow.size() == 1);
}

TEST_CASE("union fields of sequential composition are associative") {
  auto cat = load("roadside.svc");
  comp::SeqOptions opts;
  auto ab_c = comp::seq_compose(
      comp::seq_compose(cat.at("RepairShop"), cat.at("TowTruck"), opts),
      cat.at("CarRental"), opts);
  auto a_bc = comp::seq_compose(
      cat.at("RepairShop"),
      comp::seq_compose(cat.at("TowTruck"), cat.at("CarRental"), opts), opts);
  auto sets_of = [](const ConfiguredService& s) {
    std::set<std::string> out;
    for (const auto& i : s.contract.function.inputs) out.insert("i:" + i);
    for (const auto& o : s.contract.function.outputs) out.insert("o:" + o);
    for (const auto& e : s.contract.function.post) out.insert("po:" + core::render(e));
    for (const auto& e : s.contract.legal) out.insert("l:" + core::render(e));
    for (const auto& r : s.context.rules) out.insert("r:" + core::render(r));
    return out;
  };
  CHECK(sets_of(ab_c) == sets_of(a_bc));
  CHECK(ab_c.contract.nonfunctional.availability ==
        a_bc.contract.nonfunctional.availability);
  CHECK(ab_c.contract.nonfunctional.reliability ==
        a_bc.contract.nonfunctional.reliability);
  CHECK(ab_c.contract.nonfunctional.safety_time ==
        a_bc.contract.nonfunctional.safety_time);
}

TEST_CASE("multi-flow composition takes the worst case across flows") {
  core::Catalog cat;
  for (auto* n : {"Cheap", "Costly"}) {
    ConfiguredService s = priced_service(n, n == std::string("Cheap") ? 10 : 500,
                                         "oneTime");
    cat.emplace(n, s);
  }
  comp::ComposeOptions opts;
  auto r = comp::compose(comp::parse_composition_expr("Cheap ~ Costly", cat),
                         cat, opts);
  REQUIRE(r.per_flow.size() == 2);
  REQUIRE(r.composite.contract.nonfunctional.price.has_value());
  CHECK(core::render(r.composite.contract.nonfunctional.price->amount) == "500");
}

TEST_CASE("flow guards surface as preconditions of the flow composite") {
  auto cat = load("letters.svc");
  comp::ComposeOptions opts;
  auto r = comp::compose(
      comp::parse_composition_expr("if (ctx.p == true) A else B", cat), cat,
      opts);
  REQUIRE(r.per_flow.size() == 2);
  bool saw_guard = false;
  for (const auto& [flow, composite] : r.per_flow)
    for (const auto& pre : composite.contract.function.pre)
      if (core::render(pre) == "ctx.p==true" ||
          core::render(pre) == "!(ctx.p==true)")
        saw_guard = true;
  CHECK(saw_guard);
}
