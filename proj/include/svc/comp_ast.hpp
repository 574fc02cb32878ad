#pragma once

#include <memory>
#include <string>

#include "svc/spec_io.hpp"

namespace svc::comp {

// Seven composition constructs. Binary operators share one precedence level
// and associate to the left; parentheses override.
struct CompositionExpr;
using CompPtr = std::shared_ptr<const CompositionExpr>;

struct CompositionExpr {
  enum class Kind {
    Service,   // leaf reference into the catalog
    Seq,       // A >> B
    Par,       // A || B
    Priority,  // A |> B
    NoOrder,   // A <> B
    NonDet,    // A ~ B
    Cond,      // if (c) A else B
    Iter,      // while (c) A
  };

  Kind kind = Kind::Service;
  std::string service;       // Service
  CompPtr left, right;       // binary nodes; Cond uses left=then right=else;
                             // Iter uses left=body
  core::ExprPtr condition;   // Cond, Iter
};

CompPtr make_service_ref(std::string name);
CompPtr make_comp(CompositionExpr::Kind kind, CompPtr left, CompPtr right,
                  core::ExprPtr condition = nullptr);

/// Parses a composition expression; every service reference must resolve
/// against the catalog. Condition identifiers resolve against the union of
/// the catalog's parameter names.
CompPtr parse_composition_expr(const std::string& text,
                               const core::Catalog& catalog);

/// Canonical rendering (fully parenthesized, surface tokens).
std::string render_composition(const CompPtr& e);

}  // namespace svc::comp
