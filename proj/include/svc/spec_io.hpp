#pragma once

#include <map>
#include <string>

#include "svc/model.hpp"

namespace svc::core {

/// Parses a `.svc` service specification document. Throws ParseError with
/// position information on syntax errors, unknown types and duplicate names.
ConfiguredService parse_service_spec(const std::string& text);

/// Canonical serialization; byte-stable, and parse(serialize(s)) is
/// structurally equal to s for every valid service.
std::string serialize_service(const ConfiguredService& s);

/// Structural equality via canonical serialization.
bool service_equal(const ConfiguredService& a, const ConfiguredService& b);

using Catalog = std::map<std::string, ConfiguredService>;

/// Parses a catalog file: one or more `service` blocks.
Catalog parse_catalog(const std::string& text);

}  // namespace svc::core
