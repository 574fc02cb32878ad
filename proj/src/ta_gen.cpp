#include "svc/ta_gen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace svc::tagen {

using core::BinOp;
using core::ConfiguredService;
using core::Expr;
using core::ExprPtr;

const Location* Template::find_location(const std::string& id) const {
  for (const auto& l : locations)
    if (l.id == id) return &l;
  return nullptr;
}

const Template* Network::find_template(const std::string& name) const {
  for (const auto& t : templates)
    if (t.name == name) return &t;
  return nullptr;
}

namespace {

std::vector<const ConfiguredService*> participants(
    const comp::CompositionResult& sc, const core::Catalog& catalog) {
  std::vector<const ConfiguredService*> out;
  std::vector<std::string> names = sc.services;
  std::sort(names.begin(), names.end());
  for (const auto& n : names) {
    auto it = catalog.find(n);
    if (it == catalog.end()) throw TaGenError("unknown service '" + n + "'");
    out.push_back(&it->second);
  }
  return out;
}

void collect_strings(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::Literal) {
    if (const auto* s = std::get_if<std::string>(&e->literal)) out.insert(*s);
    return;
  }
  collect_strings(e->lhs, out);
  collect_strings(e->rhs, out);
}

ExprPtr conj(const std::vector<ExprPtr>& parts) {
  ExprPtr acc;
  for (const auto& p : parts)
    acc = acc ? core::make_binary(BinOp::And, acc, p) : p;
  return acc;
}

bool is_effect(const ExprPtr& e) {
  return e && e->kind == Expr::Kind::Binary && e->op == BinOp::Assign;
}

ExprPtr add_to(const std::string& var, const ExprPtr& amount) {
  return core::make_binary(BinOp::Add, core::make_var(var), amount);
}

// Maximal runs of parallel-interleaved steps: [start, end) pairs. A step
// that is not a parallel tail starts a new group.
std::vector<std::pair<size_t, size_t>> parallel_groups(const flat::Flow& f) {
  std::vector<std::pair<size_t, size_t>> groups;
  size_t i = 0;
  while (i < f.steps.size()) {
    size_t j = i + 1;
    while (j < f.steps.size() && f.steps[j].parallel_tail) ++j;
    groups.emplace_back(i, j);
    i = j;
  }
  return groups;
}

}  // namespace

std::map<std::string, long long> build_symbol_table(
    const comp::CompositionResult& sc, const core::Catalog& catalog) {
  std::set<std::string> strings;
  auto grab = [&](const std::vector<ExprPtr>& es) {
    for (const auto& e : es) collect_strings(e, strings);
  };
  for (const auto* s : participants(sc, catalog)) {
    for (const auto& p : s->params) collect_strings(p.constraint, strings);
    grab(s->context.rules);
    for (const auto& entry : s->context.info.entries)
      if (const auto* t = std::get_if<std::string>(&entry.tag))
        strings.insert(*t);
    grab(s->contract.function.pre);
    grab(s->contract.function.post);
    grab(s->contract.legal);
    grab(s->contract.nonfunctional.safety_data);
  }
  for (const auto& [flow, svc] : sc.per_flow) {
    for (const auto& step : flow.steps) grab(step.guards);
    grab(flow.exit_guards);
    (void)svc;
  }
  std::map<std::string, long long> codes;
  long long next = 1;
  for (const auto& s : strings) codes[s] = next++;  // set is already sorted
  return codes;
}

ExprPtr to_model_expr(const ExprPtr& e,
                      const std::map<std::string, long long>& symbols) {
  if (!e) return e;
  switch (e->kind) {
    case Expr::Kind::Literal:
      if (const auto* s = std::get_if<std::string>(&e->literal)) {
        auto it = symbols.find(*s);
        if (it == symbols.end())
          throw TaGenError("string constant '" + *s + "' missing from table");
        return core::make_literal(it->second);
      }
      return e;
    case Expr::Kind::Var:
    case Expr::Kind::CtxRef:
      return e;
    case Expr::Kind::Not:
      return core::make_not(to_model_expr(e->lhs, symbols));
    case Expr::Kind::Binary:
      return core::make_binary(e->op, to_model_expr(e->lhs, symbols),
                               to_model_expr(e->rhs, symbols));
  }
  return e;
}

std::pair<std::string, std::string> channel_names(const ConfiguredService& s) {
  const auto& f = s.contract.function;
  std::string req = f.request_channel.empty() ? f.name + "Req" : f.request_channel;
  std::string rsp = f.response_channel.empty() ? f.name + "Rsp" : f.response_channel;
  return {req, rsp};
}

std::string flow_ordinal(size_t i) {
  static const char* words[] = {"first", "second", "third",  "fourth", "fifth",
                                "sixth", "seventh", "eighth", "ninth", "tenth"};
  if (i >= 1 && i <= 10) return words[i - 1];
  return "flow" + std::to_string(i);
}

GlobalDecls gen_global_decls(const comp::CompositionResult& sc,
                             const core::Catalog& catalog) {
  GlobalDecls g;
  auto parts = participants(sc, catalog);
  auto symbols = build_symbol_table(sc, catalog);

  for (const auto* s : parts) {
    auto [req, rsp] = channel_names(*s);
    g.channels.push_back({s->name, req, rsp});
  }

  for (const auto* s : parts) {
    const auto& c = s->contract;
    for (size_t i = 0; i < c.function.pre.size(); ++i)
      g.marker_bools.push_back(
          {s->name + "Pre" + std::to_string(i + 1), true, 1, false});
    for (size_t i = 0; i < c.function.post.size(); ++i)
      g.marker_bools.push_back(
          {s->name + "Post" + std::to_string(i + 1), true, 0, false});
    for (size_t i = 0; i < c.legal.size(); ++i)
      g.marker_bools.push_back(
          {s->name + "Legal" + std::to_string(i + 1), true, 1, false});
  }

  // Parameter union across participants; when a name is an output anywhere
  // that direction wins, mirroring the composition rules.
  std::map<std::string, const core::Parameter*> params;
  for (const auto* s : parts)
    for (const auto& p : s->params) {
      auto [it, fresh] = params.emplace(p.name, &p);
      if (!fresh && p.direction == core::Parameter::Direction::Output)
        it->second = &p;
    }
  for (const auto& [name, p] : params) {
    bool input = p->direction == core::Parameter::Direction::Input;
    g.availability_bools.push_back({name + "B", true, input ? 1LL : 0LL, false});
  }
  for (const auto& [name, p] : params) {
    bool input = p->direction == core::Parameter::Direction::Input;
    g.typed_vars.push_back(
        {name, p->dtype.kind == core::TypeKind::Bool, 0, input});
  }

  for (size_t i = 1; i <= sc.per_flow.size(); ++i) {
    std::string ord = flow_ordinal(i);
    for (const char* suffix :
         {"PathPrice", "PathAvailability", "PathReliability", "PathTime"})
      g.path_vars.push_back({ord + suffix, false, 0, false});
  }

  // Requester-context struct fields: every dimension mentioned by a rule or
  // declared in provider info. Declared tags give the default value; string
  // tags use their integer codes.
  std::set<std::string> dims;
  std::map<std::string, long long> defaults;
  for (const auto* s : parts) {
    std::set<std::string> vars;
    for (const auto& r : s->context.rules) core::collect_vars(r, vars, dims);
    for (const auto& entry : s->context.info.entries) {
      dims.insert(entry.dimension);
      long long v = 0;
      if (const auto* b = std::get_if<bool>(&entry.tag)) v = *b ? 1 : 0;
      else if (const auto* i = std::get_if<long long>(&entry.tag)) v = *i;
      else if (const auto* str = std::get_if<std::string>(&entry.tag)) {
        auto it = symbols.find(*str);
        v = it == symbols.end() ? 0 : it->second;
      }
      defaults[entry.dimension] = v;
    }
  }
  for (const auto& d : dims) {
    auto it = defaults.find(d);
    g.requester_fields.emplace_back(d, it == defaults.end() ? 0 : it->second);
  }

  // Price amounts with fractional constants force a fixed-point scaling.
  bool fractional = false;
  std::function<void(const ExprPtr&)> scan = [&](const ExprPtr& e) {
    if (!e) return;
    if (e->kind == Expr::Kind::Literal) {
      if (const auto* d = std::get_if<double>(&e->literal))
        if (*d != std::floor(*d)) fractional = true;
      return;
    }
    scan(e->lhs);
    scan(e->rhs);
  };
  for (const auto* s : parts)
    if (s->contract.nonfunctional.price) scan(s->contract.nonfunctional.price->amount);
  g.scale = fractional ? 100 : 1;
  return g;
}

Template gen_service_template(const ConfiguredService& s,
                              const std::map<std::string, long long>& symbols) {
  Template t;
  t.name = s.name;
  std::string busy = s.name + "Processing";
  t.locations.push_back({"idle", false, std::nullopt});
  t.locations.push_back({busy, false, std::nullopt});
  t.initial = "idle";
  auto [req, rsp] = channel_names(s);

  const auto& f = s.contract.function;
  std::vector<ExprPtr> guard_parts;
  for (const auto& c : f.pre) guard_parts.push_back(to_model_expr(c, symbols));
  for (const auto& in : f.inputs) guard_parts.push_back(core::make_var(in + "B"));
  for (const auto& r : s.context.rules)
    guard_parts.push_back(to_model_expr(r, symbols));
  for (const auto& l : s.contract.legal)
    if (!is_effect(l)) guard_parts.push_back(to_model_expr(l, symbols));

  EdgeSpec e1;
  e1.source = "idle";
  e1.target = busy;
  e1.guard = conj(guard_parts);
  e1.sync_channel = req;
  e1.sync_dir = '?';
  t.edges.push_back(e1);

  EdgeSpec e2;
  e2.source = busy;
  e2.target = "idle";
  e2.sync_channel = rsp;
  e2.sync_dir = '!';
  for (const auto& c : f.post)
    if (c->kind == Expr::Kind::Binary && c->op == BinOp::Eq &&
        c->lhs->kind == Expr::Kind::Var)
      e2.updates.push_back({c->lhs->name, to_model_expr(c->rhs, symbols)});
  for (const auto& out : f.outputs)
    e2.updates.push_back({out + "B", core::make_literal(true)});
  for (const auto& l : s.contract.legal)
    if (is_effect(l) && l->lhs->kind == Expr::Kind::Var)
      e2.updates.push_back(
          {l->lhs->name, add_to(l->lhs->name, to_model_expr(l->rhs, symbols))});
  t.edges.push_back(e2);
  return t;
}

Template gen_main_ta(const comp::CompositionResult& sc,
                     const core::Catalog& catalog,
                     const std::map<std::string, long long>& symbols) {
  Template t;
  t.name = "M";
  t.initial = "i";
  t.locations.push_back({"i", false, std::nullopt});

  for (size_t fi = 0; fi < sc.per_flow.size(); ++fi) {
    const auto& flow = sc.per_flow[fi].first;
    std::string ord = flow_ordinal(fi + 1);
    std::string prev = "i";
    auto groups = parallel_groups(flow);

    // Per parallel group: the step with the largest time bound keeps the
    // invariant, the interleaved partners become committed; likewise only
    // the most reliable partner accounts for path reliability.
    std::vector<int> invariant_holder(flow.steps.size(), 1);
    std::vector<bool> committed(flow.steps.size(), false);
    std::vector<bool> counts_reliability(flow.steps.size(), true);
    for (auto [b, e] : groups) {
      if (e - b < 2) continue;
      long long best_time = -1, best_rel = -1;
      size_t time_at = b, rel_at = b;
      for (size_t j = b; j < e; ++j) {
        const auto& nf = catalog.at(flow.steps[j].service).contract.nonfunctional;
        if (nf.safety_time && *nf.safety_time > best_time) {
          best_time = *nf.safety_time;
          time_at = j;
        }
        if (nf.reliability && *nf.reliability > best_rel) {
          best_rel = *nf.reliability;
          rel_at = j;
        }
      }
      for (size_t j = b; j < e; ++j) {
        invariant_holder[j] = (best_time >= 0 && j == time_at);
        committed[j] = best_time >= 0 && j != time_at;
        counts_reliability[j] = best_rel < 0 || j == rel_at;
      }
    }

    for (size_t j = 0; j < flow.steps.size(); ++j) {
      const auto& step = flow.steps[j];
      const ConfiguredService& svc = catalog.at(step.service);
      const auto& nf = svc.contract.nonfunctional;
      auto [reqc, rspc] = channel_names(svc);

      std::string base = "F" + std::to_string(fi + 1) + "_" +
                         std::to_string(j + 1) + "_" + step.service;
      std::string done = j + 1 == flow.steps.size()
                             ? "Final_" + std::to_string(fi + 1)
                             : base + "_done";

      bool timed = nf.safety_time && invariant_holder[j] && !committed[j];
      std::string clock = "x" + std::to_string(fi + 1) + "_" + std::to_string(j + 1);

      Location waiting{base, committed[j], std::nullopt};
      if (timed) {
        waiting.invariant = {clock, *nf.safety_time};
        t.clocks.push_back(clock);
      }
      t.locations.push_back(waiting);
      t.locations.push_back({done, false, std::nullopt});

      EdgeSpec launch;
      launch.source = prev;
      launch.target = base;
      std::vector<ExprPtr> guard_parts;
      for (const auto& g : step.guards)
        guard_parts.push_back(to_model_expr(g, symbols));
      for (const auto& d : nf.safety_data)
        guard_parts.push_back(to_model_expr(d, symbols));
      launch.guard = conj(guard_parts);
      launch.sync_channel = reqc;
      launch.sync_dir = '!';
      if (timed) launch.updates.push_back({clock, core::make_literal(0LL)});
      t.edges.push_back(launch);

      EdgeSpec settle;
      settle.source = base;
      settle.target = done;
      settle.sync_channel = rspc;
      settle.sync_dir = '?';
      if (nf.price)
        settle.updates.push_back(
            {ord + "PathPrice",
             add_to(ord + "PathPrice", to_model_expr(nf.price->amount, symbols))});
      if (nf.availability)
        settle.updates.push_back(
            {ord + "PathAvailability",
             add_to(ord + "PathAvailability", core::make_literal(*nf.availability))});
      if (nf.reliability && counts_reliability[j])
        settle.updates.push_back(
            {ord + "PathReliability",
             add_to(ord + "PathReliability", core::make_literal(*nf.reliability))});
      if (nf.safety_time)
        settle.updates.push_back(
            {ord + "PathTime",
             add_to(ord + "PathTime", core::make_literal(*nf.safety_time))});
      t.edges.push_back(settle);
      prev = done;
    }
  }
  return t;
}

Network build_network(const comp::CompositionResult& sc,
                      const core::Catalog& catalog) {
  Network net;
  net.symbol_codes = build_symbol_table(sc, catalog);
  net.decls = gen_global_decls(sc, catalog);
  auto parts = participants(sc, catalog);
  for (const auto* s : parts)
    net.templates.push_back(gen_service_template(*s, net.symbol_codes));
  net.templates.push_back(gen_main_ta(sc, catalog, net.symbol_codes));

  std::string systems;
  for (const auto& t : net.templates) {
    if (!systems.empty()) systems += ", ";
    systems += t.name;
  }
  net.system_line = "system " + systems + ";";

  long long max_const = 0;
  for (const auto& t : net.templates)
    for (const auto& l : t.locations)
      if (l.invariant) max_const = std::max(max_const, l.invariant->second);
  net.clock_cap = max_const + 1;
  return net;
}

std::vector<Query> gen_queries(const comp::CompositionResult& sc,
                               const Network& net,
                               const comp::ComposeOptions& opts) {
  std::vector<Query> qs;
  auto expr_query = [&](Query::Form form, const std::string& loc,
                        const ExprPtr& concl, const std::string& category) {
    Query q;
    q.form = form;
    q.target = {loc, nullptr};
    q.conclusion = {std::nullopt, concl};
    q.category = category;
    if (form == Query::Form::ExistsEventually)
      q.text = "E<> M." + loc;
    else
      q.text = "A[] M." + loc + " imply " + render(concl, core::RenderStyle::Model);
    qs.push_back(std::move(q));
  };
  auto model = [&](const ExprPtr& e) { return to_model_expr(e, net.symbol_codes); };

  for (size_t i = 1; i <= sc.per_flow.size(); ++i)
    expr_query(Query::Form::ExistsEventually, "Final_" + std::to_string(i),
               nullptr, "reachability");

  for (const auto& r : sc.composite.context.rules)
    expr_query(Query::Form::AlwaysImplies, "i", model(r), "context");

  for (const auto& in : sc.composite.contract.function.inputs)
    expr_query(Query::Form::AlwaysImplies, "i", core::make_var(in + "B"),
               "input availability");

  // Initial-state preconditions: only the ones shared by every flow variant
  // (flow guards surface as preconditions and differ per branch).
  std::vector<ExprPtr> common;
  if (!sc.per_flow.empty()) {
    common = sc.per_flow.front().second.contract.function.pre;
    for (size_t i = 1; i < sc.per_flow.size(); ++i) {
      std::vector<ExprPtr> next;
      for (const auto& c : common)
        if (core::contains_expr(sc.per_flow[i].second.contract.function.pre, c))
          next.push_back(c);
      common = std::move(next);
    }
  }
  for (const auto& c : common)
    expr_query(Query::Form::AlwaysImplies, "i", model(c), "precondition");

  for (const auto& out : sc.composite.contract.function.outputs)
    expr_query(Query::Form::AlwaysImplies, "i",
               core::make_not(core::make_var(out + "B")), "output availability");

  core::Environment env{opts.bindings, opts.requester};
  for (size_t i = 0; i < sc.per_flow.size(); ++i) {
    const auto& flow = sc.per_flow[i].first;
    const auto& comp = sc.per_flow[i].second;
    std::string fin = "Final_" + std::to_string(i + 1);
    std::string ord = flow_ordinal(i + 1);

    for (const auto& out : comp.contract.function.outputs)
      expr_query(Query::Form::AlwaysImplies, fin, core::make_var(out + "B"),
                 "output availability");
    for (const auto& c : comp.contract.function.post)
      expr_query(Query::Form::AlwaysImplies, fin, model(c), "postcondition");

    const auto& nf = comp.contract.nonfunctional;
    if (nf.price) {
      try {
        core::Value v = core::eval_constraint(nf.price->amount, env);
        long long bound;
        if (const auto* ll = std::get_if<long long>(&v))
          bound = *ll * net.decls.scale;
        else
          bound = std::llround(std::get<double>(v) * (double)net.decls.scale);
        expr_query(Query::Form::AlwaysImplies, fin,
                   core::make_binary(BinOp::Le, core::make_var(ord + "PathPrice"),
                                     core::make_literal(bound)),
                   "nonfunctional");
      } catch (const core::EvalError&) {
        // Unbound usage parameter: no concrete price bound to check.
      }
    }
    if (nf.safety_time)
      expr_query(Query::Form::AlwaysImplies, fin,
                 core::make_binary(BinOp::Le, core::make_var(ord + "PathTime"),
                                   core::make_literal(*nf.safety_time)),
                 "nonfunctional");
    if (nf.availability)
      expr_query(Query::Form::AlwaysImplies, fin,
                 core::make_binary(BinOp::Le,
                                   core::make_var(ord + "PathAvailability"),
                                   core::make_literal(*nf.availability)),
                 "nonfunctional");
    if (nf.reliability)
      expr_query(Query::Form::AlwaysImplies, fin,
                 core::make_binary(BinOp::Ge,
                                   core::make_var(ord + "PathReliability"),
                                   core::make_literal(*nf.reliability)),
                 "nonfunctional");

    for (const auto& l : comp.contract.legal)
      if (!is_effect(l))
        expr_query(Query::Form::AlwaysImplies, fin, model(l), "legal");

    // Accumulated legal obligations: the constant effects along the flow
    // must cover the final value of each effect variable.
    std::map<std::string, long long> sums;
    (void)flow;
    for (const auto& l : comp.contract.legal)
      if (is_effect(l) && l->lhs->kind == Expr::Kind::Var) {
        try {
          core::Value v = core::eval_constraint(l->rhs, env);
          long long amount = 0;
          if (const auto* ll = std::get_if<long long>(&v)) amount = *ll;
          else amount = std::llround(std::get<double>(v));
          sums[l->lhs->name] += amount;
        } catch (const core::EvalError&) {
        }
      }
    for (const auto& [var, total] : sums)
      expr_query(Query::Form::AlwaysImplies, fin,
                 core::make_binary(BinOp::Ge, core::make_literal(total),
                                   core::make_var(var)),
                 "legal");
  }
  return qs;
}

}  // namespace svc::tagen
