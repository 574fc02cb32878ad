#include "svc/flatten.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "svc/model.hpp"

namespace svc::flat {

namespace {

using comp::CompositionExpr;
using Kind = CompositionExpr::Kind;

Flow concat(const Flow& a, const Flow& b) {
  Flow out = a;
  out.steps.insert(out.steps.end(), b.steps.begin(), b.steps.end());
  out.exit_guards = core::union_exprs(a.exit_guards, b.exit_guards);
  return out;
}

void add_guard(Flow& f, const core::ExprPtr& g) {
  if (f.steps.empty()) {
    f.exit_guards.push_back(g);
    return;
  }
  f.steps.front().guards.insert(f.steps.front().guards.begin(), g);
}

// All interleavings of two step sequences, whole services as units.
void shuffles(const std::vector<FlowStep>& a, size_t ia,
              const std::vector<FlowStep>& b, size_t ib,
              std::vector<FlowStep>& acc,
              std::vector<std::vector<FlowStep>>& out) {
  if (ia == a.size() && ib == b.size()) {
    out.push_back(acc);
    return;
  }
  if (ia < a.size()) {
    acc.push_back(a[ia]);
    shuffles(a, ia + 1, b, ib, acc, out);
    acc.pop_back();
  }
  if (ib < b.size()) {
    acc.push_back(b[ib]);
    shuffles(a, ia, b, ib + 1, acc, out);
    acc.pop_back();
  }
}

std::vector<Flow> interleave(const std::vector<Flow>& ls,
                             const std::vector<Flow>& rs, bool mark_tails) {
  std::vector<Flow> out;
  for (const auto& l : ls) {
    for (const auto& r : rs) {
      std::vector<std::vector<FlowStep>> orders;
      std::vector<FlowStep> acc;
      shuffles(l.steps, 0, r.steps, 0, acc, orders);
      for (auto& steps : orders) {
        Flow f;
        f.steps = std::move(steps);
        f.exit_guards = core::union_exprs(l.exit_guards, r.exit_guards);
        if (mark_tails)
          for (size_t i = 1; i < f.steps.size(); ++i)
            f.steps[i].parallel_tail = true;
        out.push_back(std::move(f));
      }
    }
  }
  return out;
}

int max_rank(const std::vector<Flow>& flows) {
  int m = 0;
  for (const auto& f : flows)
    for (const auto& s : f.steps)
      if (s.priority_rank) m = std::max(m, *s.priority_rank);
  return m;
}

std::vector<Flow> flatten_rec(const comp::CompPtr& e, int k) {
  if (!e) throw std::invalid_argument("null composition expression");
  switch (e->kind) {
    case Kind::Service: {
      Flow f;
      f.steps.push_back(FlowStep{e->service, {}, false, 0, std::nullopt});
      return {f};
    }
    case Kind::Seq: {
      auto ls = flatten_rec(e->left, k);
      auto rs = flatten_rec(e->right, k);
      std::vector<Flow> out;
      for (const auto& l : ls)
        for (const auto& r : rs) out.push_back(concat(l, r));
      return out;
    }
    case Kind::Par:
      return interleave(flatten_rec(e->left, k), flatten_rec(e->right, k), true);
    case Kind::NoOrder:
      return interleave(flatten_rec(e->left, k), flatten_rec(e->right, k), false);
    case Kind::NonDet: {
      auto out = flatten_rec(e->left, k);
      auto rs = flatten_rec(e->right, k);
      out.insert(out.end(), rs.begin(), rs.end());
      return out;
    }
    case Kind::Priority: {
      auto ls = flatten_rec(e->left, k);
      for (auto& f : ls)
        for (auto& s : f.steps)
          if (!s.priority_rank) s.priority_rank = 1;
      int next = max_rank(ls) + 1;
      auto rs = flatten_rec(e->right, k);
      for (auto& f : rs)
        for (auto& s : f.steps) s.priority_rank = next;
      ls.insert(ls.end(), rs.begin(), rs.end());
      return ls;
    }
    case Kind::Cond: {
      auto ts = flatten_rec(e->left, k);
      for (auto& f : ts) add_guard(f, e->condition);
      auto es = flatten_rec(e->right, k);
      core::ExprPtr neg = core::make_not(e->condition);
      for (auto& f : es) add_guard(f, neg);
      ts.insert(ts.end(), es.begin(), es.end());
      return ts;
    }
    case Kind::Iter: {
      auto body = flatten_rec(e->left, k);
      std::vector<Flow> out;
      // k=0: the empty repetition; the exit guard !c is a flow-level
      // annotation, not a step.
      Flow zero;
      zero.exit_guards.push_back(core::make_not(e->condition));
      out.push_back(zero);
      std::vector<Flow> prefixes = {Flow{}};
      for (int rep = 1; rep <= k; ++rep) {
        std::vector<Flow> next;
        for (const auto& p : prefixes) {
          for (auto b : body) {
            add_guard(b, e->condition);
            for (auto& s : b.steps)
              if (s.iteration_index == 0) s.iteration_index = rep;
            next.push_back(concat(p, b));
          }
        }
        out.insert(out.end(), next.begin(), next.end());
        prefixes = std::move(next);
      }
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

std::string flow_signature(const Flow& f) {
  std::string out;
  for (size_t i = 0; i < f.steps.size(); ++i) {
    const FlowStep& s = f.steps[i];
    if (i > 0) out += s.parallel_tail ? " `>> " : " >> ";
    for (const auto& g : s.guards) out += "[" + core::render(g) + "]";
    out += s.service;
    if (s.iteration_index > 0)
      out += "{" + std::to_string(s.iteration_index) + "}";
  }
  return out;
}

std::vector<Flow> flatten(const comp::CompPtr& expr, int unroll_k) {
  if (unroll_k < 1) throw std::invalid_argument("unroll bound must be >= 1");
  std::vector<Flow> flows = flatten_rec(expr, unroll_k);

  // Sequential-only result set: drop empty flows (a bare while at top level
  // with zero iterations denotes no service execution), dedupe by signature
  // and order canonically.
  std::map<std::string, Flow> by_sig;
  for (auto& f : flows) {
    if (f.steps.empty()) continue;
    by_sig.emplace(flow_signature(f), std::move(f));
  }
  std::vector<Flow> out;
  for (auto& [sig, f] : by_sig) {
    std::vector<core::ExprPtr> guard_set = f.exit_guards;
    for (const auto& s : f.steps)
      for (const auto& g : s.guards)
        if (!core::contains_expr(guard_set, g)) guard_set.push_back(g);
    if (!guard_set.empty())
      f.vacuous = !core::satisfiable_over_mentioned_constants(guard_set).satisfiable;
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace svc::flat
