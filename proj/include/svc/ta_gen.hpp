#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "svc/compose.hpp"

namespace svc::tagen {

struct TaGenError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Extended timed automata
// ---------------------------------------------------------------------------

struct Location {
  std::string id;
  bool committed = false;
  // Invariant of the form clock <= bound; committed locations carry none.
  std::optional<std::pair<std::string, long long>> invariant;
};

struct Assignment {
  std::string target;       // variable or clock
  core::ExprPtr value;      // model-space expression
};

struct EdgeSpec {
  std::string source, target;
  std::string select;                 // emitted empty; no Select bindings
  core::ExprPtr guard;                // model-space; null means true
  std::string sync_channel;           // empty = no synchronization
  char sync_dir = '?';                // '!' send, '?' receive
  std::vector<Assignment> updates;    // applied atomically in order
};

struct Template {
  std::string name;
  std::vector<Location> locations;
  std::string initial;
  std::vector<std::string> clocks;
  std::vector<EdgeSpec> edges;

  const Location* find_location(const std::string& id) const;
};

struct VarDecl {
  std::string name;
  bool is_bool = false;
  long long init = 0;       // bools use 0/1
  bool needs_binding = false;  // typed parameter variables bound at init
};

struct GlobalDecls {
  struct Channel {
    std::string service, request, response;
  };
  std::vector<Channel> channels;           // one pair per service
  std::vector<VarDecl> marker_bools;       // per-precondition/postcondition and
                                           // legal-issue booleans
  std::vector<VarDecl> availability_bools; // <param>B, input=true output=false
  std::vector<VarDecl> typed_vars;         // one per composition parameter
  std::vector<VarDecl> path_vars;          // PathPrice/... quadruple per flow
  std::vector<std::pair<std::string, long long>> requester_fields;  // dim, init
  long long scale = 1;                     // price scaling factor
};

struct Network {
  GlobalDecls decls;
  std::vector<Template> templates;  // service templates by name, then main "M"
  std::string system_line;
  // Integer encoding of every string constant appearing in the model,
  // codes assigned 1..n in lexicographic order.
  std::map<std::string, long long> symbol_codes;
  long long clock_cap = 1;  // max clock constant + 1

  const Template* find_template(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Queries (TCTL subset: E<> and A[] ... imply ...)
// ---------------------------------------------------------------------------

struct StatePred {
  std::optional<std::string> location;  // main-TA location id
  core::ExprPtr expr;                   // model-space; null = true
};

struct Query {
  enum class Form { ExistsEventually, AlwaysImplies };
  Form form = Form::ExistsEventually;
  StatePred target;      // E<>: the state to reach; A[]: the premise
  StatePred conclusion;  // A[] only
  std::string category;  // verification-property category for reports
  std::string text;      // rendered query line
};

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

/// Integer encoding of string constants: collects every string literal and
/// context tag in the participating services and assigns codes 1..n in
/// lexicographic order.
std::map<std::string, long long> build_symbol_table(
    const comp::CompositionResult& sc, const core::Catalog& catalog);

/// Rewrites a service-level constraint into model space: string literals
/// become their integer codes; variable and context references stay.
core::ExprPtr to_model_expr(const core::ExprPtr& e,
                            const std::map<std::string, long long>& symbols);

/// Channel pair for a service (explicit declaration or <name>Req/<name>Rsp).
std::pair<std::string, std::string> channel_names(
    const core::ConfiguredService& s);

/// Per-flow path-variable prefix: first, second, ... tenth, then flow<N>.
std::string flow_ordinal(size_t index_one_based);

GlobalDecls gen_global_decls(const comp::CompositionResult& sc,
                             const core::Catalog& catalog);

Template gen_service_template(const core::ConfiguredService& s,
                              const std::map<std::string, long long>& symbols);

Template gen_main_ta(const comp::CompositionResult& sc,
                     const core::Catalog& catalog,
                     const std::map<std::string, long long>& symbols);

std::vector<Query> gen_queries(const comp::CompositionResult& sc,
                               const Network& net,
                               const comp::ComposeOptions& opts);

/// Orchestrates symbol table, declarations and all templates.
Network build_network(const comp::CompositionResult& sc,
                      const core::Catalog& catalog);

}  // namespace svc::tagen
