#pragma once

#include <map>
#include <string>
#include <vector>

#include "svc/ta_gen.hpp"

namespace svc::upio {

/// Renders the network as a UPPAAL 4.x "nta" document. Deterministic and
/// byte-stable: same network, same bytes. UTF-8, LF line endings.
std::string export_model(const tagen::Network& net);

/// Renders the query list as a .q file; a `//` comment line introduces each
/// property category.
std::string export_queries(const std::vector<tagen::Query>& queries);

// ---------------------------------------------------------------------------
// Structural read-back (round-trip checks; handles the subset we emit)
// ---------------------------------------------------------------------------

struct ParsedTransition {
  std::string source, target;
  std::map<std::string, std::string> labels;  // kind -> text
};

struct ParsedLocation {
  std::string id, name;
  bool committed = false;
  std::string invariant;  // empty if none
};

struct ParsedTemplate {
  std::string name;
  std::string declaration;
  std::vector<ParsedLocation> locations;
  std::string init_ref;
  std::vector<ParsedTransition> transitions;
};

struct ParsedModel {
  std::string declaration;
  std::vector<ParsedTemplate> templates;
  std::string system;
};

struct XmlError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ParsedModel parse_model(const std::string& xml);

}  // namespace svc::upio
