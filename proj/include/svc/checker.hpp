#pragma once

#include <map>
#include <string>
#include <vector>

#include "svc/ta_gen.hpp"

namespace svc::chk {

struct CheckError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Explicit network state under discrete time: one location per template
/// (template order), clock valuation and variable valuation in the fixed
/// orders exposed by Indexer. Totally ordered for canonical exploration.
struct NetworkState {
  std::vector<std::string> locations;
  std::vector<long long> clocks;
  std::vector<long long> vars;

  auto operator<=>(const NetworkState&) const = default;
};

/// Fixed naming/ordering of the state vector derived from the declarations:
/// variables are markers, availability booleans, typed parameters, path
/// accumulators, then requester-context fields (as RequesterContext.<dim>).
struct Indexer {
  explicit Indexer(const tagen::Network& net);

  const tagen::Network& net;
  std::vector<std::string> clock_names;
  std::vector<std::string> var_names;
  std::vector<bool> var_is_bool;
  std::map<std::string, size_t> clock_index;
  std::map<std::string, size_t> var_index;
};

/// Initial state: declared initial values, typed input parameters bound from
/// `bindings` (missing binding is an error; strings use their integer codes,
/// unknown strings encode to 0), requester-context fields taken from the
/// requester info (absent dimension encodes to 0).
NetworkState init_state(const Indexer& ix, const core::ContextInfo& requester,
                        const std::map<std::string, core::Value>& bindings);

/// One-step successors: a unit delay (blocked by committed locations and
/// location invariants, clocks saturate at the network cap) plus every
/// enabled binary channel synchronization; sender updates apply before
/// receiver updates. When a committed location is occupied only
/// synchronizations leaving a committed location may fire. Each successor
/// is paired with a human-readable action label.
std::vector<std::pair<std::string, NetworkState>> successors(
    const Indexer& ix, const NetworkState& s);

struct TraceStep {
  std::string action;  // "init", "delay" or "<chan>: <sender> -> <receiver>"
  NetworkState state;
};

struct Verdict {
  bool holds = false;
  bool bound_hit = false;       // exploration stopped at the state bound
  long long states_explored = 0;
  // Witness for E<> (reaching trace), counterexample for A[] violations.
  std::vector<TraceStep> evidence;
};

/// Breadth-first exploration in canonical state order up to `state_bound`
/// distinct states. E<> holds iff a satisfying state is reachable; A[] p
/// imply c fails iff a state satisfying p but not c is reachable. A verdict
/// reached before the bound is exact; otherwise bound_hit is set and the
/// verdict is the best knowledge so far (no witness found / no violation
/// found).
Verdict check_query(const Indexer& ix, const tagen::Query& q,
                    const NetworkState& init, long long state_bound);

/// Evaluates a state predicate (main-TA location and/or boolean expression).
bool pred_holds(const Indexer& ix, const tagen::StatePred& p,
                const NetworkState& s);

/// Replays a trace: checks the actions connect consecutive states via the
/// network's transition relation starting from the given state.
bool replay_trace(const Indexer& ix, const std::vector<TraceStep>& trace);

/// Independent naive enumeration (separately implemented transition
/// relation) used as a differential oracle for check_query.
Verdict brute_force_oracle(const Indexer& ix, const tagen::Query& q,
                           const NetworkState& init, long long state_bound);

std::string state_to_string(const Indexer& ix, const NetworkState& s);

}  // namespace svc::chk
