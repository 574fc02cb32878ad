#include "svc/spec_io.hpp"

#include <set>
#include <sstream>

#include "svc/lexer.hpp"

namespace svc::core {

namespace {

Value parse_value(Lexer& lex) {
  bool neg = lex.accept_symbol("-");
  Token t = lex.next();
  switch (t.kind) {
    case Token::Kind::Int:
      return neg ? -t.int_value : t.int_value;
    case Token::Kind::Double:
      return neg ? -t.double_value : t.double_value;
    case Token::Kind::String:
      if (neg) lex.fail_at(t, "negated string");
      return t.text;
    case Token::Kind::Ident:
      if (neg) lex.fail_at(t, "negated identifier");
      if (t.text == "true") return true;
      if (t.text == "false") return false;
      return t.text;  // bare symbol
    default:
      lex.fail_at(t, "expected value");
  }
}

DataType parse_type(Lexer& lex) {
  Token t = lex.expect_ident();
  if (t.text == "enum") {
    DataType dt;
    dt.kind = TypeKind::Enum;
    dt.enum_name = lex.expect_ident().text;
    lex.expect_symbol("{");
    while (!lex.accept_symbol("}")) {
      dt.enum_values.push_back(lex.expect_ident().text);
      lex.accept_symbol(",");
    }
    return dt;
  }
  auto dt = type_from_name(t.text);
  if (!dt) lex.fail_at(t, "unknown type '" + t.text + "'");
  return *dt;
}

class SpecParser {
 public:
  explicit SpecParser(Lexer& lex) : lex_(lex) {}

  ConfiguredService parse_service() {
    ConfiguredService s;
    if (!lex_.accept_ident("service")) lex_.fail("expected 'service'");
    s.name = lex_.expect_ident().text;
    lex_.expect_symbol("{");
    // The parameters section comes first so constraint identifiers resolve.
    if (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "parameters")
      parse_parameters(s);
    while (!lex_.accept_symbol("}")) {
      Token t = lex_.expect_ident();
      if (t.text == "attributes") parse_attributes(s);
      else if (t.text == "context") parse_context(s);
      else if (t.text == "contract") parse_contract(s);
      else lex_.fail_at(t, "unknown section '" + t.text + "'");
    }
    return s;
  }

 private:
  void parse_parameters(ConfiguredService& s) {
    lex_.expect_ident();  // parameters
    lex_.expect_symbol("{");
    while (!lex_.accept_symbol("}")) {
      Parameter p;
      Token name = lex_.expect_ident();
      p.name = name.text;
      if (!params_.insert(p.name).second)
        lex_.fail_at(name, "duplicate parameter name '" + p.name + "'");
      lex_.expect_symbol(":");
      p.dtype = parse_type(lex_);
      Token dir = lex_.expect_ident();
      if (dir.text == "input") p.direction = Parameter::Direction::Input;
      else if (dir.text == "output") p.direction = Parameter::Direction::Output;
      else lex_.fail_at(dir, "expected 'input' or 'output'");
      if (lex_.accept_ident("where"))
        p.constraint = parse_constraint_from(lex_, params_);
      lex_.expect_symbol(";");
      s.params.push_back(std::move(p));
    }
  }

  void parse_attributes(ConfiguredService& s) {
    lex_.expect_symbol("{");
    while (!lex_.accept_symbol("}")) {
      Attribute a;
      a.name = lex_.expect_ident().text;
      lex_.expect_symbol(":");
      a.dtype = parse_type(lex_);
      lex_.expect_symbol("=");
      a.value = parse_value(lex_);
      lex_.expect_symbol(";");
      s.attrs.push_back(std::move(a));
    }
  }

  void parse_context(ConfiguredService& s) {
    lex_.expect_symbol("{");
    while (!lex_.accept_symbol("}")) {
      Token t = lex_.expect_ident();
      if (t.text == "rules") {
        lex_.expect_symbol("{");
        while (!lex_.accept_symbol("}")) {
          s.context.rules.push_back(parse_constraint_from(lex_, params_));
          lex_.expect_symbol(";");
        }
      } else if (t.text == "info") {
        lex_.expect_symbol("{");
        while (!lex_.accept_symbol("}")) {
          std::string dim = lex_.expect_ident().text;
          lex_.expect_symbol(":");
          DataType dt = parse_type(lex_);
          lex_.expect_symbol("=");
          Value tag = parse_value(lex_);
          lex_.expect_symbol(";");
          s.context.info.entries.push_back({dim, tag});
          s.context.info.typing[dim] = dt;
        }
      } else {
        lex_.fail_at(t, "unknown context item '" + t.text + "'");
      }
    }
  }

  std::vector<std::string> parse_name_list() {
    std::vector<std::string> out;
    lex_.expect_symbol("{");
    while (!lex_.accept_symbol("}")) {
      out.push_back(lex_.expect_ident().text);
      lex_.accept_symbol(",");
    }
    return out;
  }

  std::vector<ExprPtr> parse_constraint_list(bool allow_assign = false) {
    std::vector<ExprPtr> out;
    lex_.expect_symbol("{");
    while (!lex_.accept_symbol("}")) {
      out.push_back(parse_constraint_from(lex_, params_, allow_assign));
      lex_.expect_symbol(";");
    }
    return out;
  }

  void parse_function(ServiceFunction& f) {
    lex_.expect_symbol("{");
    while (!lex_.accept_symbol("}")) {
      Token t = lex_.expect_ident();
      if (t.text == "name") {
        f.name = lex_.expect_ident().text;
        lex_.expect_symbol(";");
      } else if (t.text == "address") {
        Token a = lex_.next();
        if (a.kind != Token::Kind::String && a.kind != Token::Kind::Ident)
          lex_.fail_at(a, "expected address");
        f.addresses.push_back(a.text);
        lex_.expect_symbol(";");
      } else if (t.text == "request_channel") {
        f.request_channel = lex_.expect_ident().text;
        lex_.expect_symbol(";");
      } else if (t.text == "response_channel") {
        f.response_channel = lex_.expect_ident().text;
        lex_.expect_symbol(";");
      } else if (t.text == "inputs") {
        f.inputs = parse_name_list();
      } else if (t.text == "result") {
        f.result_name = lex_.expect_ident().text;
        lex_.expect_symbol(";");
      } else if (t.text == "outputs") {
        f.outputs = parse_name_list();
      } else if (t.text == "pre") {
        f.pre = parse_constraint_list();
      } else if (t.text == "post") {
        f.post = parse_constraint_list();
      } else if (t.text == "post_observable") {
        Token b = lex_.expect_ident();
        if (b.text == "true") f.post_observable = true;
        else if (b.text == "false") f.post_observable = false;
        else lex_.fail_at(b, "expected true or false");
        lex_.expect_symbol(";");
      } else {
        lex_.fail_at(t, "unknown function item '" + t.text + "'");
      }
    }
  }

  std::vector<std::pair<std::string, int>> parse_rec_list() {
    std::vector<std::pair<std::string, int>> out;
    lex_.expect_symbol("{");
    while (!lex_.accept_symbol("}")) {
      std::string who = lex_.expect_ident().text;
      lex_.expect_symbol(":");
      Token g = lex_.next();
      if (g.kind != Token::Kind::Int) lex_.fail_at(g, "expected trust grade");
      lex_.expect_symbol(";");
      out.emplace_back(who, static_cast<int>(g.int_value));
    }
    return out;
  }

  void parse_nonfunctional(Nonfunctional& nf) {
    lex_.expect_symbol("{");
    while (!lex_.accept_symbol("}")) {
      Token t = lex_.expect_ident();
      if (t.text == "safety_time" || t.text == "reliability" ||
          t.text == "availability") {
        Token n = lex_.next();
        if (n.kind != Token::Kind::Int) lex_.fail_at(n, "expected time value");
        lex_.expect_symbol(";");
        if (t.text == "safety_time") nf.safety_time = n.int_value;
        else if (t.text == "reliability") nf.reliability = n.int_value;
        else nf.availability = n.int_value;
      } else if (t.text == "safety_data") {
        nf.safety_data = parse_constraint_list();
      } else if (t.text == "security") {
        nf.security = parse_name_list();
      } else if (t.text == "price") {
        Price p;
        lex_.expect_symbol("{");
        while (!lex_.accept_symbol("}")) {
          Token k = lex_.expect_ident();
          if (k.text == "amount") {
            p.amount = parse_constraint_from(lex_, params_);
          } else if (k.text == "currency") {
            p.currency = lex_.expect_ident().text;
          } else if (k.text == "unit") {
            p.unit = lex_.expect_ident().text;
          } else if (k.text == "usage") {
            p.usage_param = lex_.expect_ident().text;
          } else {
            lex_.fail_at(k, "unknown price item '" + k.text + "'");
          }
          lex_.expect_symbol(";");
        }
        nf.price = std::move(p);
      } else if (t.text == "trust") {
        ProviderTrust tr;
        lex_.expect_symbol("{");
        while (!lex_.accept_symbol("}")) {
          Token k = lex_.expect_ident();
          if (k.text == "ce") tr.client_recs = parse_rec_list();
          else if (k.text == "re") tr.org_recs = parse_rec_list();
          else if (k.text == "pg") {
            Token b = lex_.expect_ident();
            tr.lowest_price = b.text == "true";
            lex_.expect_symbol(";");
          } else {
            lex_.fail_at(k, "unknown trust item '" + k.text + "'");
          }
        }
        nf.trust = std::move(tr);
      } else {
        lex_.fail_at(t, "unknown nonfunctional item '" + t.text + "'");
      }
    }
  }

  void parse_contract(ConfiguredService& s) {
    lex_.expect_symbol("{");
    while (!lex_.accept_symbol("}")) {
      Token t = lex_.expect_ident();
      if (t.text == "function") parse_function(s.contract.function);
      else if (t.text == "nonfunctional") parse_nonfunctional(s.contract.nonfunctional);
      else if (t.text == "legal") s.contract.legal = parse_constraint_list(true);
      else lex_.fail_at(t, "unknown contract item '" + t.text + "'");
    }
  }

  Lexer& lex_;
  std::set<std::string> params_;
};

}  // namespace

ConfiguredService parse_service_spec(const std::string& text) {
  Lexer lex(text);
  SpecParser p(lex);
  ConfiguredService s = p.parse_service();
  if (!lex.at_end()) lex.fail("trailing input after service");
  return s;
}

Catalog parse_catalog(const std::string& text) {
  Lexer lex(text);
  Catalog cat;
  while (!lex.at_end()) {
    SpecParser p(lex);
    ConfiguredService s = p.parse_service();
    if (cat.count(s.name))
      throw ParseError("duplicate service '" + s.name + "'", 0, 0);
    cat.emplace(s.name, std::move(s));
  }
  return cat;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

std::string value_text(const Value& v) { return render_value(v); }

std::string type_text(const DataType& t) {
  if (t.kind != TypeKind::Enum) return type_name(t);
  std::string s = "enum " + t.enum_name + " {";
  for (size_t i = 0; i < t.enum_values.size(); ++i)
    s += (i ? ", " : "") + t.enum_values[i];
  return s + "}";
}

void write_constraint_list(std::ostringstream& out, const std::string& indent,
                           const std::string& keyword,
                           const std::vector<ExprPtr>& list) {
  if (list.empty()) return;
  out << indent << keyword << " {\n";
  for (const auto& e : list) out << indent << "  " << render(e) << ";\n";
  out << indent << "}\n";
}

void write_name_list(std::ostringstream& out, const std::string& indent,
                     const std::string& keyword,
                     const std::vector<std::string>& names) {
  out << indent << keyword << " { ";
  for (size_t i = 0; i < names.size(); ++i)
    out << (i ? ", " : "") << names[i];
  out << (names.empty() ? "}" : " }") << "\n";
}

}  // namespace

std::string serialize_service(const ConfiguredService& s) {
  std::ostringstream out;
  out << "service " << s.name << " {\n";

  out << "  parameters {\n";
  for (const auto& p : s.params) {
    out << "    " << p.name << ": " << type_text(p.dtype);
    out << (p.direction == Parameter::Direction::Input ? " input" : " output");
    if (p.constraint) out << " where " << render(p.constraint);
    out << ";\n";
  }
  out << "  }\n";

  if (!s.attrs.empty()) {
    out << "  attributes {\n";
    for (const auto& a : s.attrs)
      out << "    " << a.name << ": " << type_text(a.dtype) << " = "
          << value_text(a.value) << ";\n";
    out << "  }\n";
  }

  if (!s.context.rules.empty() || !s.context.info.entries.empty()) {
    out << "  context {\n";
    write_constraint_list(out, "    ", "rules", s.context.rules);
    if (!s.context.info.entries.empty()) {
      out << "    info {\n";
      for (const auto& e : s.context.info.entries) {
        auto it = s.context.info.typing.find(e.dimension);
        std::string tname =
            it != s.context.info.typing.end() ? type_text(it->second) : "string";
        out << "      " << e.dimension << ": " << tname << " = "
            << value_text(e.tag) << ";\n";
      }
      out << "    }\n";
    }
    out << "  }\n";
  }

  const auto& f = s.contract.function;
  out << "  contract {\n";
  out << "    function {\n";
  out << "      name " << f.name << ";\n";
  for (const auto& a : f.addresses) out << "      address \"" << a << "\";\n";
  if (!f.request_channel.empty())
    out << "      request_channel " << f.request_channel << ";\n";
  if (!f.response_channel.empty())
    out << "      response_channel " << f.response_channel << ";\n";
  write_name_list(out, "      ", "inputs", f.inputs);
  if (!f.result_name.empty()) out << "      result " << f.result_name << ";\n";
  write_name_list(out, "      ", "outputs", f.outputs);
  write_constraint_list(out, "      ", "pre", f.pre);
  write_constraint_list(out, "      ", "post", f.post);
  if (!f.post_observable) out << "      post_observable false;\n";
  out << "    }\n";

  const auto& nf = s.contract.nonfunctional;
  bool has_nf = nf.safety_time || !nf.safety_data.empty() ||
                !nf.security.empty() || nf.reliability || nf.availability ||
                nf.price || nf.trust;
  if (has_nf) {
    out << "    nonfunctional {\n";
    if (nf.safety_time) out << "      safety_time " << *nf.safety_time << ";\n";
    write_constraint_list(out, "      ", "safety_data", nf.safety_data);
    if (!nf.security.empty())
      write_name_list(out, "      ", "security", nf.security);
    if (nf.reliability) out << "      reliability " << *nf.reliability << ";\n";
    if (nf.availability) out << "      availability " << *nf.availability << ";\n";
    if (nf.price) {
      out << "      price {\n";
      out << "        amount " << render(nf.price->amount) << ";\n";
      out << "        currency " << nf.price->currency << ";\n";
      out << "        unit " << nf.price->unit << ";\n";
      if (!nf.price->usage_param.empty())
        out << "        usage " << nf.price->usage_param << ";\n";
      out << "      }\n";
    }
    if (nf.trust) {
      out << "      trust {\n";
      auto write_recs = [&](const char* kw,
                            const std::vector<std::pair<std::string, int>>& recs) {
        if (recs.empty()) return;
        out << "        " << kw << " {\n";
        for (const auto& [who, g] : recs)
          out << "          " << who << ": " << g << ";\n";
        out << "        }\n";
      };
      write_recs("ce", nf.trust->client_recs);
      out << "        pg " << (nf.trust->lowest_price ? "true" : "false") << ";\n";
      write_recs("re", nf.trust->org_recs);
      out << "      }\n";
    }
    out << "    }\n";
  }

  write_constraint_list(out, "    ", "legal", s.contract.legal);
  out << "  }\n";
  out << "}\n";
  return out.str();
}

bool service_equal(const ConfiguredService& a, const ConfiguredService& b) {
  return serialize_service(a) == serialize_service(b);
}

}  // namespace svc::core
