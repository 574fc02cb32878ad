#include "svc/checker.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace svc::chk {

using core::Value;
using tagen::Network;

Indexer::Indexer(const Network& n) : net(n) {
  for (const auto& t : net.templates)
    for (const auto& c : t.clocks) {
      clock_index[c] = clock_names.size();
      clock_names.push_back(c);
    }
  auto add = [&](const std::string& name, bool is_bool) {
    var_index[name] = var_names.size();
    var_names.push_back(name);
    var_is_bool.push_back(is_bool);
  };
  const auto& g = net.decls;
  for (const auto& v : g.marker_bools) add(v.name, true);
  for (const auto& v : g.availability_bools) add(v.name, true);
  for (const auto& v : g.typed_vars) add(v.name, v.is_bool);
  for (const auto& v : g.path_vars) add(v.name, false);
  for (const auto& [dim, init] : g.requester_fields) {
    (void)init;
    add("RequesterContext." + dim, false);
  }
}

namespace {

long long encode_value(const Indexer& ix, const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b ? 1 : 0;
  if (const auto* i = std::get_if<long long>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) return std::llround(*d);
  const auto& s = std::get<std::string>(v);
  auto it = ix.net.symbol_codes.find(s);
  return it == ix.net.symbol_codes.end() ? 0 : it->second;
}

core::Environment env_for(const Indexer& ix, const NetworkState& s) {
  core::Environment env;
  const std::string prefix = "RequesterContext.";
  for (size_t i = 0; i < ix.var_names.size(); ++i) {
    const auto& name = ix.var_names[i];
    if (name.rfind(prefix, 0) == 0) {
      env.requester_context.entries.push_back(
          {name.substr(prefix.size()), Value{s.vars[i]}});
    } else if (ix.var_is_bool[i]) {
      env.bindings[name] = s.vars[i] != 0;
    } else {
      env.bindings[name] = s.vars[i];
    }
  }
  return env;
}

bool guard_holds(const Indexer& ix, const core::ExprPtr& g,
                 const NetworkState& s) {
  if (!g) return true;
  return core::eval_bool(g, env_for(ix, s));
}

void apply_updates(const Indexer& ix, const std::vector<tagen::Assignment>& us,
                   NetworkState& s) {
  for (const auto& u : us) {
    long long v = encode_value(ix, core::eval_constraint(u.value, env_for(ix, s)));
    auto c = ix.clock_index.find(u.target);
    if (c != ix.clock_index.end()) {
      s.clocks[c->second] = v;
      continue;
    }
    auto it = ix.var_index.find(u.target);
    if (it == ix.var_index.end())
      throw CheckError("update targets unknown variable '" + u.target + "'");
    s.vars[it->second] = v;
  }
}

bool invariants_hold(const Indexer& ix, const NetworkState& s) {
  for (size_t t = 0; t < ix.net.templates.size(); ++t) {
    const auto* loc = ix.net.templates[t].find_location(s.locations[t]);
    if (!loc) throw CheckError("state names unknown location");
    if (loc->invariant &&
        s.clocks[ix.clock_index.at(loc->invariant->first)] >
            loc->invariant->second)
      return false;
  }
  return true;
}

bool committed_occupied(const Indexer& ix, const NetworkState& s) {
  for (size_t t = 0; t < ix.net.templates.size(); ++t) {
    const auto* loc = ix.net.templates[t].find_location(s.locations[t]);
    if (loc && loc->committed) return true;
  }
  return false;
}

}  // namespace

NetworkState init_state(const Indexer& ix, const core::ContextInfo& requester,
                        const std::map<std::string, Value>& bindings) {
  NetworkState s;
  for (const auto& t : ix.net.templates) s.locations.push_back(t.initial);
  s.clocks.assign(ix.clock_names.size(), 0);

  const auto& g = ix.net.decls;
  for (const auto& v : g.marker_bools) s.vars.push_back(v.init);
  for (const auto& v : g.availability_bools) s.vars.push_back(v.init);
  for (const auto& v : g.typed_vars) {
    if (!v.needs_binding) {
      s.vars.push_back(v.init);
      continue;
    }
    auto it = bindings.find(v.name);
    if (it == bindings.end())
      throw CheckError("missing binding for input parameter '" + v.name + "'");
    s.vars.push_back(encode_value(ix, it->second));
  }
  for (const auto& v : g.path_vars) s.vars.push_back(v.init);
  for (const auto& [dim, init] : g.requester_fields) {
    (void)init;
    const Value* v = requester.find(dim);
    s.vars.push_back(v ? encode_value(ix, *v) : 0);
  }
  return s;
}

std::vector<std::pair<std::string, NetworkState>> successors(
    const Indexer& ix, const NetworkState& s) {
  std::vector<std::pair<std::string, NetworkState>> out;
  const auto& ts = ix.net.templates;
  bool committed = committed_occupied(ix, s);

  if (!committed && !ix.clock_names.empty()) {
    NetworkState d = s;
    for (auto& c : d.clocks) c = std::min(c + 1, ix.net.clock_cap);
    if (invariants_hold(ix, d)) out.emplace_back("delay", std::move(d));
  }

  for (size_t si = 0; si < ts.size(); ++si)
    for (const auto& se : ts[si].edges) {
      if (se.sync_channel.empty() || se.sync_dir != '!') continue;
      if (se.source != s.locations[si]) continue;
      if (!guard_holds(ix, se.guard, s)) continue;
      const auto* sloc = ts[si].find_location(se.source);
      for (size_t ri = 0; ri < ts.size(); ++ri) {
        if (ri == si) continue;
        for (const auto& re : ts[ri].edges) {
          if (re.sync_channel != se.sync_channel || re.sync_dir != '?') continue;
          if (re.source != s.locations[ri]) continue;
          if (!guard_holds(ix, re.guard, s)) continue;
          const auto* rloc = ts[ri].find_location(re.source);
          if (committed && !(sloc && sloc->committed) && !(rloc && rloc->committed))
            continue;
          NetworkState n = s;
          n.locations[si] = se.target;
          n.locations[ri] = re.target;
          apply_updates(ix, se.updates, n);
          apply_updates(ix, re.updates, n);
          if (!invariants_hold(ix, n)) continue;
          out.emplace_back(se.sync_channel + ": " + ts[si].name + " -> " +
                               ts[ri].name,
                           std::move(n));
        }
      }
    }
  return out;
}

bool pred_holds(const Indexer& ix, const tagen::StatePred& p,
                const NetworkState& s) {
  if (p.location) {
    size_t main_idx = ix.net.templates.size();
    for (size_t t = 0; t < ix.net.templates.size(); ++t)
      if (ix.net.templates[t].name == "M") main_idx = t;
    if (main_idx == ix.net.templates.size())
      throw CheckError("network has no main template");
    if (s.locations[main_idx] != *p.location) return false;
  }
  if (p.expr) return core::eval_bool(p.expr, env_for(ix, s));
  return true;
}

Verdict check_query(const Indexer& ix, const tagen::Query& q,
                    const NetworkState& init, long long state_bound) {
  struct Entry {
    NetworkState state;
    long long parent;  // -1 for the root
    std::string action;
  };
  std::vector<Entry> entries;
  std::map<NetworkState, long long> seen;
  std::deque<long long> frontier;
  entries.push_back({init, -1, "init"});
  seen[init] = 0;
  frontier.push_back(0);

  Verdict v;
  auto build_evidence = [&](long long at) {
    std::vector<TraceStep> trace;
    for (long long i = at; i >= 0; i = entries[i].parent)
      trace.push_back({entries[i].action, entries[i].state});
    std::reverse(trace.begin(), trace.end());
    return trace;
  };

  bool exists = q.form == tagen::Query::Form::ExistsEventually;
  while (!frontier.empty()) {
    long long cur = frontier.front();
    frontier.pop_front();
    ++v.states_explored;
    const NetworkState s = entries[cur].state;

    if (exists) {
      if (pred_holds(ix, q.target, s)) {
        v.holds = true;
        v.evidence = build_evidence(cur);
        return v;
      }
    } else if (pred_holds(ix, q.target, s) && !pred_holds(ix, q.conclusion, s)) {
      v.holds = false;
      v.evidence = build_evidence(cur);
      return v;
    }

    for (auto& [action, next] : successors(ix, s)) {
      if (seen.count(next)) continue;
      if ((long long)entries.size() >= state_bound) {
        v.bound_hit = true;
        continue;
      }
      long long id = (long long)entries.size();
      entries.push_back({next, cur, action});
      seen[next] = id;
      frontier.push_back(id);
    }
  }
  // Exploration terminated: exact unless the bound truncated it.
  v.holds = exists ? false : true;
  if (v.bound_hit && !exists) v.holds = true;  // best knowledge, flagged
  return v;
}

bool replay_trace(const Indexer& ix, const std::vector<TraceStep>& trace) {
  if (trace.empty()) return false;
  for (size_t i = 1; i < trace.size(); ++i) {
    bool matched = false;
    for (auto& [action, next] : successors(ix, trace[i - 1].state))
      if (action == trace[i].action && next == trace[i].state) {
        matched = true;
        break;
      }
    if (!matched) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Differential oracle: an independently written transition relation.
// ---------------------------------------------------------------------------

namespace {

// Deliberately separate from successors(): straight-line re-derivation of
// the semantics used only for cross-checking.
std::vector<NetworkState> naive_moves(const Indexer& ix, const NetworkState& s) {
  std::vector<NetworkState> out;
  const auto& net = ix.net;

  int committed_count = 0;
  for (size_t t = 0; t < net.templates.size(); ++t)
    for (const auto& l : net.templates[t].locations)
      if (l.id == s.locations[t] && l.committed) ++committed_count;

  auto inv_ok = [&](const NetworkState& cand) {
    for (size_t t = 0; t < net.templates.size(); ++t)
      for (const auto& l : net.templates[t].locations)
        if (l.id == cand.locations[t] && l.invariant) {
          long long cv = cand.clocks[ix.clock_index.at(l.invariant->first)];
          if (cv > l.invariant->second) return false;
        }
    return true;
  };

  if (committed_count == 0 && !s.clocks.empty()) {
    NetworkState d = s;
    for (size_t c = 0; c < d.clocks.size(); ++c)
      if (d.clocks[c] < net.clock_cap) d.clocks[c] += 1;
    if (inv_ok(d)) out.push_back(d);
  }

  for (size_t a = 0; a < net.templates.size(); ++a)
    for (size_t b = 0; b < net.templates.size(); ++b) {
      if (a == b) continue;
      for (const auto& ea : net.templates[a].edges)
        for (const auto& eb : net.templates[b].edges) {
          if (ea.sync_dir != '!' || eb.sync_dir != '?') continue;
          if (ea.sync_channel.empty() || ea.sync_channel != eb.sync_channel)
            continue;
          if (s.locations[a] != ea.source || s.locations[b] != eb.source)
            continue;
          core::Environment env = env_for(ix, s);
          if (ea.guard && !core::eval_bool(ea.guard, env)) continue;
          if (eb.guard && !core::eval_bool(eb.guard, env)) continue;
          if (committed_count > 0) {
            bool from_committed = false;
            for (const auto& l : net.templates[a].locations)
              if (l.id == ea.source && l.committed) from_committed = true;
            for (const auto& l : net.templates[b].locations)
              if (l.id == eb.source && l.committed) from_committed = true;
            if (!from_committed) continue;
          }
          NetworkState n = s;
          n.locations[a] = ea.target;
          n.locations[b] = eb.target;
          for (const auto* phase : {&ea.updates, &eb.updates})
            for (const auto& u : *phase) {
              long long val = encode_value(
                  ix, core::eval_constraint(u.value, env_for(ix, n)));
              if (ix.clock_index.count(u.target))
                n.clocks[ix.clock_index.at(u.target)] = val;
              else
                n.vars[ix.var_index.at(u.target)] = val;
            }
          if (inv_ok(n)) out.push_back(n);
        }
    }
  return out;
}

}  // namespace

Verdict brute_force_oracle(const Indexer& ix, const tagen::Query& q,
                           const NetworkState& init, long long state_bound) {
  std::set<NetworkState> visited;
  std::vector<NetworkState> stack{init};
  visited.insert(init);
  Verdict v;
  bool exists = q.form == tagen::Query::Form::ExistsEventually;
  bool found = false;
  while (!stack.empty()) {
    NetworkState s = stack.back();
    stack.pop_back();
    ++v.states_explored;
    if (exists) {
      if (pred_holds(ix, q.target, s)) {
        found = true;
        break;
      }
    } else if (pred_holds(ix, q.target, s) && !pred_holds(ix, q.conclusion, s)) {
      found = true;
      break;
    }
    for (const auto& n : naive_moves(ix, s)) {
      if (visited.count(n)) continue;
      if ((long long)visited.size() >= state_bound) {
        v.bound_hit = true;
        continue;
      }
      visited.insert(n);
      stack.push_back(n);
    }
  }
  v.holds = exists ? found : !found;
  return v;
}

std::string state_to_string(const Indexer& ix, const NetworkState& s) {
  std::string out = "(";
  for (size_t t = 0; t < ix.net.templates.size(); ++t) {
    if (t) out += " ";
    out += ix.net.templates[t].name + "." + s.locations[t];
  }
  out += ")";
  for (size_t c = 0; c < ix.clock_names.size(); ++c)
    out += " " + ix.clock_names[c] + "=" + std::to_string(s.clocks[c]);
  for (size_t i = 0; i < ix.var_names.size(); ++i)
    out += " " + ix.var_names[i] + "=" + std::to_string(s.vars[i]);
  return out;
}

}  // namespace svc::chk
