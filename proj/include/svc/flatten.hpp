#pragma once

#include <optional>
#include <string>
#include <vector>

#include "svc/comp_ast.hpp"

namespace svc::flat {

/// One sequential step of a flattened flow. `parallel_tail` marks steps
/// produced by interleaving a parallel group (the "grave" sequencing),
/// which triggers the committed-state and reliability exceptions during
/// automaton generation.
struct FlowStep {
  std::string service;
  std::vector<core::ExprPtr> guards;  // conditional / iteration guards
  bool parallel_tail = false;
  int iteration_index = 0;            // > 0 for steps produced by iteration
  std::optional<int> priority_rank;
};

/// A purely sequential flow. `exit_guards` carries flow-level annotations
/// that are not attached to any step (the negated loop condition of a
/// zero-iteration unrolling). `vacuous` flags flows whose accumulated guard
/// set is unsatisfiable.
struct Flow {
  std::vector<FlowStep> steps;
  std::vector<core::ExprPtr> exit_guards;
  bool vacuous = false;
};

/// Flattens a composition expression into the set of sequential flows it
/// denotes, unrolling iteration up to K repetitions. Output is
/// deduplicated and ordered by flow_signature.
std::vector<Flow> flatten(const comp::CompPtr& expr, int unroll_k);

/// Canonical textual identity of a flow: names joined by " >> "
/// (" `>> " for parallel tails), "[guard]" prefixes, "{k}" iteration
/// suffixes. Golden-file stable.
std::string flow_signature(const Flow& f);

}  // namespace svc::flat
