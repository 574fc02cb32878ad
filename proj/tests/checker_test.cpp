#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "svc/checker.hpp"

using namespace svc;

namespace {

core::Catalog load(const std::string& name) {
  std::ifstream in(std::string(FIXTURES_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return core::parse_catalog(ss.str());
}

struct Setup {
  core::Catalog catalog;
  comp::CompositionResult sc;
  tagen::Network net;
  std::vector<tagen::Query> queries;
  comp::ComposeOptions opts;
};

Setup roadside_setup(const std::string& membership = "caa") {
  Setup s;
  s.catalog = load("roadside.svc");
  s.opts.bindings = {{"CarBroken", true},       {"carType", std::string("toyota")},
                     {"failureType", std::string("engine")},
                     {"Deposit", 0LL},          {"RequestTruck", true},
                     {"NeedCar", true},         {"NumOfDays", 5LL}};
  s.opts.requester.entries = {{"membership", membership}, {"age", 25LL}};
  s.sc = comp::compose(
      comp::parse_composition_expr("RepairShop >> TowTruck >> CarRental",
                                   s.catalog),
      s.catalog, s.opts);
  s.net = tagen::build_network(s.sc, s.catalog);
  s.queries = tagen::gen_queries(s.sc, s.net, s.opts);
  return s;
}

long long var(const chk::Indexer& ix, const chk::NetworkState& s,
              const std::string& name) {
  return s.vars.at(ix.var_index.at(name));
}

}  // namespace

TEST_CASE("initial state encodes bindings, codes and requester context") {
  auto su = roadside_setup();
  chk::Indexer ix(su.net);
  auto s0 = chk::init_state(ix, su.opts.requester, su.opts.bindings);

  CHECK(var(ix, s0, "CarBroken") == 1);
  CHECK(var(ix, s0, "carType") == 3);           // toyota's integer code
  CHECK(var(ix, s0, "failureType") == 0);       // not in the string universe
  CHECK(var(ix, s0, "CarBrokenB") == 1);
  CHECK(var(ix, s0, "CarReservedB") == 0);
  CHECK(var(ix, s0, "RepairShopPre1") == 1);
  CHECK(var(ix, s0, "firstPathPrice") == 0);
  CHECK(var(ix, s0, "RequesterContext.membership") == 2);  // caa
  CHECK(var(ix, s0, "RequesterContext.age") == 25);
  for (auto c : s0.clocks) CHECK(c == 0);
  CHECK(s0.locations == std::vector<std::string>{"idle", "idle", "idle", "i"});

  auto partial = su.opts.bindings;
  partial.erase("NeedCar");
  CHECK_THROWS_WITH_AS(chk::init_state(ix, su.opts.requester, partial),
                       doctest::Contains("NeedCar"), chk::CheckError);
}

TEST_CASE("delay saturates at the clock cap and respects invariants") {
  auto su = roadside_setup();
  chk::Indexer ix(su.net);
  auto s0 = chk::init_state(ix, su.opts.requester, su.opts.bindings);

  auto next = chk::successors(ix, s0);
  int delays = 0;
  for (const auto& [action, st] : next)
    if (action == "delay") {
      ++delays;
      for (size_t i = 0; i < st.clocks.size(); ++i)
        CHECK(st.clocks[i] == std::min(s0.clocks[i] + 1, su.net.clock_cap));
    }
  CHECK(delays == 1);

  // Drive the system into the TowTruck wait (invariant x1_2 <= 10) and let
  // time run out: the delay successor must disappear at the boundary.
  chk::NetworkState s = s0;
  auto take = [&](const std::string& chan) {
    for (auto& [action, st] : chk::successors(ix, s))
      if (action.rfind(chan + ":", 0) == 0) {
        s = st;
        return true;
      }
    return false;
  };
  REQUIRE(take("ScheduleApt"));
  REQUIRE(take("AptConfirmed"));
  REQUIRE(take("TowReq"));
  size_t x12 = ix.clock_index.at("x1_2");
  for (int i = 0; i < 10; ++i) {
    bool delayed = false;
    for (auto& [action, st] : chk::successors(ix, s))
      if (action == "delay") {
        s = st;
        delayed = true;
      }
    REQUIRE(delayed);
  }
  CHECK(s.clocks[x12] == 10);
  for (auto& [action, st] : chk::successors(ix, s)) CHECK(action != "delay");
}

TEST_CASE("a failing context rule blocks the request synchronization") {
  auto su = roadside_setup("none");  // not a caa member
  chk::Indexer ix(su.net);
  auto s0 = chk::init_state(ix, su.opts.requester, su.opts.bindings);
  for (const auto& [action, st] : chk::successors(ix, s0))
    CHECK(action.find("ScheduleApt") == std::string::npos);

  tagen::Query reach;
  reach.form = tagen::Query::Form::ExistsEventually;
  reach.target = {"Final_1", nullptr};
  reach.text = "E<> M.Final_1";
  auto v = chk::check_query(ix, reach, s0, 100000);
  CHECK_FALSE(v.holds);
  CHECK_FALSE(v.bound_hit);  // exhausted the state space, exact verdict
}

TEST_CASE("the roadside query list passes and witnesses replay") {
  auto su = roadside_setup();
  chk::Indexer ix(su.net);
  auto s0 = chk::init_state(ix, su.opts.requester, su.opts.bindings);
  REQUIRE(!su.queries.empty());
  for (const auto& q : su.queries) {
    auto v = chk::check_query(ix, q, s0, 100000);
    CAPTURE(q.text);
    CHECK(v.holds);
    CHECK_FALSE(v.bound_hit);
    CHECK(v.states_explored < 100000);
    if (!v.evidence.empty()) {
      CHECK(v.evidence.front().action == "init");
      CHECK(chk::replay_trace(ix, v.evidence));
    }
  }
}

TEST_CASE("counterexamples for violated universal properties replay") {
  auto su = roadside_setup();
  su.opts.bindings["NeedCar"] = false;  // break the input availability premise
  chk::Indexer ix(su.net);
  auto s0 = chk::init_state(ix, su.opts.requester, su.opts.bindings);

  tagen::Query q;
  q.form = tagen::Query::Form::AlwaysImplies;
  q.target = {"i", nullptr};
  q.conclusion = {std::nullopt, core::make_var("NeedCarB")};
  q.text = "A[] M.i imply NeedCarB";
  auto v = chk::check_query(ix, q, s0, 100000);
  CHECK(v.holds);  // the B flag is independent of the typed value
  // the typed value itself is now visibly false at the initial state
  tagen::Query q2 = q;
  q2.conclusion = {std::nullopt, core::make_var("NeedCar")};
  q2.text = "A[] M.i imply NeedCar";
  auto v2 = chk::check_query(ix, q2, s0, 100000);
  CHECK_FALSE(v2.holds);
  REQUIRE(!v2.evidence.empty());
  CHECK(chk::replay_trace(ix, v2.evidence));
  CHECK(chk::pred_holds(ix, q2.target, v2.evidence.back().state));
  CHECK_FALSE(chk::pred_holds(ix, tagen::StatePred{std::nullopt, q2.conclusion.expr},
                              v2.evidence.back().state));
}

TEST_CASE("a tiny bound yields an inconclusive verdict, a larger one an exact one") {
  auto su = roadside_setup();
  chk::Indexer ix(su.net);
  auto s0 = chk::init_state(ix, su.opts.requester, su.opts.bindings);
  tagen::Query reach;
  reach.form = tagen::Query::Form::ExistsEventually;
  reach.target = {"Final_1", nullptr};
  auto tiny = chk::check_query(ix, reach, s0, 3);
  CHECK(tiny.bound_hit);
  CHECK_FALSE(tiny.holds);
  auto full = chk::check_query(ix, reach, s0, 100000);
  CHECK(full.holds);
  CHECK_FALSE(full.bound_hit);
  CHECK(chk::replay_trace(ix, full.evidence));
  CHECK(full.evidence.back().state.locations.back() == "Final_1");
}

TEST_CASE("universal and existential forms are dual") {
  auto su = roadside_setup();
  chk::Indexer ix(su.net);
  auto s0 = chk::init_state(ix, su.opts.requester, su.opts.bindings);
  for (const auto& q : su.queries) {
    if (q.form != tagen::Query::Form::AlwaysImplies) continue;
    tagen::Query dual;
    dual.form = tagen::Query::Form::ExistsEventually;
    dual.target = {q.target.location,
                   q.conclusion.expr ? core::make_not(q.conclusion.expr)
                                     : core::make_literal(false)};
    auto va = chk::check_query(ix, q, s0, 100000);
    auto ve = chk::check_query(ix, dual, s0, 100000);
    CAPTURE(q.text);
    CHECK(va.holds == !ve.holds);
  }
}

TEST_CASE("breadth-first checker agrees with the naive oracle") {
  auto su = roadside_setup();
  chk::Indexer ix(su.net);
  auto s0 = chk::init_state(ix, su.opts.requester, su.opts.bindings);
  for (const auto& q : su.queries) {
    auto fast = chk::check_query(ix, q, s0, 100000);
    auto slow = chk::brute_force_oracle(ix, q, s0, 100000);
    CAPTURE(q.text);
    CHECK(fast.holds == slow.holds);
    CHECK(fast.bound_hit == slow.bound_hit);
  }
}

TEST_CASE("checker and oracle agree on randomized two-service networks") {
  std::mt19937 rng(20250826);
  auto pick = [&](long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(rng);
  };
  for (int trial = 0; trial < 100; ++trial) {
    long long st1 = pick(0, 3), st2 = pick(0, 3);
    long long rel1 = pick(50, 100), rel2 = pick(50, 100);
    long long av1 = pick(1, 4), av2 = pick(1, 4);
    std::ostringstream spec;
    auto service = [&](const std::string& n, long long st, long long rel,
                       long long av) {
      spec << "service " << n << " {\n"
           << "  parameters { " << n << "In: bool input; " << n
           << "Out: bool output; }\n"
           << "  contract {\n    function {\n      name Do" << n
           << "; address \"" << n << "\"; inputs { " << n << "In } result R"
           << n << "; outputs { " << n << "Out }\n      pre { " << n
           << "In == true; } post { " << n << "Out == true; }\n    }\n"
           << "    nonfunctional {\n";
      if (st > 0) spec << "      safety_time " << st << ";\n";
      spec << "      reliability " << rel << ";\n      availability " << av
           << ";\n      price { amount " << pick(1, 50)
           << "; currency dollar; unit oneTime; }\n    }\n  }\n}\n";
    };
    service("S", st1, rel1, av1);
    service("T", st2, rel2, av2);
    auto cat = core::parse_catalog(spec.str());

    static const char* shapes[] = {"S >> T", "S || T", "S ~ T", "S <> T",
                                   "S |> T"};
    std::string shape = shapes[pick(0, 4)];
    comp::ComposeOptions opts;
    opts.bindings = {{"SIn", pick(0, 1) == 1}, {"TIn", true}};
    auto sc = comp::compose(comp::parse_composition_expr(shape, cat), cat, opts);
    auto net = tagen::build_network(sc, cat);
    auto queries = tagen::gen_queries(sc, net, opts);
    chk::Indexer ix(net);
    auto s0 = chk::init_state(ix, opts.requester, opts.bindings);

    for (const auto& q : queries) {
      auto fast = chk::check_query(ix, q, s0, 20000);
      auto slow = chk::brute_force_oracle(ix, q, s0, 20000);
      CAPTURE(trial);
      CAPTURE(shape);
      CAPTURE(q.text);
      REQUIRE(fast.holds == slow.holds);
      REQUIRE(fast.bound_hit == slow.bound_hit);
      if (!fast.evidence.empty()) REQUIRE(chk::replay_trace(ix, fast.evidence));
    }
  }
}
