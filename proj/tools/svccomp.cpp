#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "svc/checker.hpp"
#include "svc/compose.hpp"
#include "svc/spec_io.hpp"
#include "svc/ta_gen.hpp"
#include "svc/uppaal_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace svc;

namespace {

// Exit codes: 2 parse, 3 validation, 4 composition/model, 5 verification
// failure, 6 bound-inconclusive.
enum ExitCode {
  kOk = 0,
  kError = 1,
  kParse = 2,
  kValidation = 3,
  kComposition = 4,
  kVerifyFail = 5,
  kInconclusive = 6,
};

struct StageError : std::runtime_error {
  StageError(int code, const std::string& msg)
      : std::runtime_error(msg), code(code) {}
  int code;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StageError(kError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StageError(kError, "cannot write " + path.string());
  out << content;
}

core::Value json_value(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw StageError(kError, "unsupported value in options document");
}

comp::ComposeOptions load_options(const std::string& path) {
  comp::ComposeOptions o;
  if (path.empty()) return o;
  json j = json::parse(slurp(path));
  auto mode = j.value("pricing_mode", "normal");
  if (mode == "normal") o.pricing_mode = comp::PricingMode::Normal;
  else if (mode == "promotional") o.pricing_mode = comp::PricingMode::Promotional;
  else if (mode == "special_sale") o.pricing_mode = comp::PricingMode::SpecialSale;
  else throw StageError(kError, "unknown pricing_mode '" + mode + "'");
  auto logic = j.value("trust_logic", "b_requires_a");
  if (logic == "b_requires_a") o.trust_logic = comp::TrustLogic::BRequiresA;
  else if (logic == "a_leads_to_b") o.trust_logic = comp::TrustLogic::ALeadsToB;
  else if (logic == "packaged") o.trust_logic = comp::TrustLogic::Packaged;
  else throw StageError(kError, "unknown trust_logic '" + logic + "'");
  auto aggr = j.value("trust_aggregator", "glb");
  if (aggr == "avg") o.trust_aggregator = comp::TrustAggregator::Avg;
  else if (aggr == "choose") o.trust_aggregator = comp::TrustAggregator::Choose;
  else if (aggr == "glb") o.trust_aggregator = comp::TrustAggregator::Glb;
  else if (aggr == "lub") o.trust_aggregator = comp::TrustAggregator::Lub;
  else throw StageError(kError, "unknown trust_aggregator '" + aggr + "'");
  o.po_a_observable = j.value("po_a_observable", true);
  o.b_requires_more = j.value("b_requires_more", true);
  o.choose_seed = j.value("choose_seed", 0u);
  o.unroll = j.value("unroll_bound", 1);
  if (j.contains("bindings"))
    for (auto& [k, v] : j["bindings"].items()) o.bindings[k] = json_value(v);
  if (j.contains("requester"))
    for (auto& [k, v] : j["requester"].items())
      o.requester.entries.push_back({k, json_value(v)});
  return o;
}

struct Run {
  std::vector<std::string> catalog_paths;
  std::string expr_arg;
  std::string options_path;
  std::string out_dir = ".";
  long long bound = 100000;
  int unroll = -1;  // -1: take the options document's value
  std::string format = "text";

  core::Catalog catalog;
  comp::ComposeOptions opts;

  void load() {
    opts = load_options(options_path);
    if (unroll >= 0) opts.unroll = unroll;
    for (const auto& p : catalog_paths) {
      core::Catalog part = core::parse_catalog(slurp(p));
      for (auto& [name, svc] : part) {
        if (catalog.count(name))
          throw StageError(kValidation, "duplicate service '" + name + "'");
        catalog.emplace(name, std::move(svc));
      }
    }
    if (catalog.empty())
      throw StageError(kError, "no services loaded; use --catalog");
  }

  std::string expr_text() const {
    if (expr_arg.empty()) throw StageError(kError, "missing --expr");
    if (expr_arg[0] == '@') {
      std::string text = slurp(expr_arg.substr(1));
      // allow trailing newline in expression files
      while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
        text.pop_back();
      return text;
    }
    return expr_arg;
  }

  fs::path out(const std::string& name) const {
    fs::create_directories(out_dir);
    return fs::path(out_dir) / name;
  }
};

int cmd_validate(Run& r) {
  int violations = 0;
  std::ostringstream report;
  for (const auto& [name, svc] : r.catalog) {
    auto vs = core::validate_service(svc);
    for (const auto& v : vs) {
      report << name << ": " << v.where << ": " << v.message << "\n";
      ++violations;
    }
  }
  if (violations == 0) {
    std::cout << "all services valid (" << r.catalog.size() << " checked)\n";
    return kOk;
  }
  std::cout << report.str();
  std::cout << violations << " violation(s)\n";
  return kValidation;
}

comp::CompositionResult composed(Run& r) {
  auto expr = comp::parse_composition_expr(r.expr_text(), r.catalog);
  return comp::compose(expr, r.catalog, r.opts);
}

int cmd_compose(Run& r) {
  auto result = composed(r);
  std::string doc = core::serialize_service(result.composite);
  spit(r.out("composite.svc"), doc);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "composite written: " << r.out("composite.svc").string() << "\n";
  return kOk;
}

int cmd_flatten(Run& r) {
  auto expr = comp::parse_composition_expr(r.expr_text(), r.catalog);
  auto flows = flat::flatten(expr, r.opts.unroll);
  std::string lines;
  for (const auto& f : flows) lines += flat::flow_signature(f) + "\n";
  spit(r.out("flows.txt"), lines);
  std::cout << lines;
  return kOk;
}

struct Generated {
  comp::CompositionResult sc;
  tagen::Network net;
  std::vector<tagen::Query> queries;
};

Generated generated(Run& r) {
  Generated g{composed(r), {}, {}};
  g.net = tagen::build_network(g.sc, r.catalog);
  g.queries = tagen::gen_queries(g.sc, g.net, r.opts);
  return g;
}

int cmd_transform(Run& r) {
  auto g = generated(r);
  spit(r.out("model.xml"), upio::export_model(g.net));
  spit(r.out("model.q"), upio::export_queries(g.queries));
  std::cout << "model written: " << r.out("model.xml").string() << ", "
            << r.out("model.q").string() << "\n";
  return kOk;
}

int cmd_verify(Run& r, const Generated& g) {
  chk::Indexer ix(g.net);
  chk::NetworkState init = chk::init_state(ix, r.opts.requester, r.opts.bindings);
  std::ostringstream text, machine;
  int fails = 0, inconclusive = 0;
  for (const auto& q : g.queries) {
    chk::Verdict v = chk::check_query(ix, q, init, r.bound);
    const char* verdict =
        v.bound_hit ? "INCONCLUSIVE" : (v.holds ? "PASS" : "FAIL");
    if (!v.bound_hit && !v.holds) ++fails;
    if (v.bound_hit) ++inconclusive;
    text << verdict << "  " << q.text << "  (states=" << v.states_explored
         << ")\n";
    if (!v.holds && !v.evidence.empty()) {
      text << "  trace:\n";
      for (const auto& step : v.evidence)
        text << "    " << step.action << "  "
             << chk::state_to_string(ix, step.state) << "\n";
    }
    json rec = {{"category", q.category},
                {"query", q.text},
                {"verdict", verdict},
                {"states", v.states_explored},
                {"bound_hit", v.bound_hit}};
    machine << rec.dump() << "\n";
  }
  std::string summary = std::to_string(g.queries.size()) + " queries, " +
                        std::to_string(fails) + " failed, " +
                        std::to_string(inconclusive) + " inconclusive\n";
  text << summary;
  if (r.format == "machine") {
    spit(r.out("report.machine"), machine.str());
  } else {
    spit(r.out("report.txt"), text.str());
  }
  std::cout << text.str();
  if (fails > 0) return kVerifyFail;
  if (inconclusive > 0) return kInconclusive;
  return kOk;
}

int cmd_pipeline(Run& r) {
  int rc = cmd_validate(r);
  if (rc != kOk) return rc;
  auto g = generated(r);
  spit(r.out("composite.svc"), core::serialize_service(g.sc.composite));
  std::string lines;
  for (const auto& [flow, svc] : g.sc.per_flow) {
    (void)svc;
    lines += flat::flow_signature(flow) + "\n";
  }
  spit(r.out("flows.txt"), lines);
  spit(r.out("model.xml"), upio::export_model(g.net));
  spit(r.out("model.q"), upio::export_queries(g.queries));
  return cmd_verify(r, g);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-dependent service composition and verification"};
  app.require_subcommand(1);

  Run r;
  std::string command;
  for (const char* name : {"validate", "compose", "flatten", "transform",
                           "verify", "pipeline"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--catalog", r.catalog_paths, "service catalog file(s)")
        ->required();
    sub->add_option("--expr", r.expr_arg,
                    "composition expression (or @file)");
    sub->add_option("--options", r.options_path, "options document (JSON)");
    sub->add_option("--out", r.out_dir, "output directory");
    sub->add_option("--bound", r.bound, "state-exploration bound");
    sub->add_option("--unroll", r.unroll, "iteration unrolling bound");
    sub->add_option("--format", r.format)
        ->check(CLI::IsMember({"text", "machine"}));
    sub->callback([&command, name] { command = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    r.load();
    if (command == "validate") return cmd_validate(r);
    if (command == "compose") return cmd_compose(r);
    if (command == "flatten") return cmd_flatten(r);
    if (command == "transform") return cmd_transform(r);
    if (command == "verify") {
      auto g = generated(r);
      return cmd_verify(r, g);
    }
    return cmd_pipeline(r);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const core::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const comp::CompositionError& e) {
    std::cerr << "composition error: " << e.what() << "\n";
    return kComposition;
  } catch (const tagen::TaGenError& e) {
    std::cerr << "model generation error: " << e.what() << "\n";
    return kComposition;
  } catch (const chk::CheckError& e) {
    std::cerr << "verification setup error: " << e.what() << "\n";
    return kComposition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
}
