#include <fstream>
#include <sstream>

#include "doctest.h"
#include "svc/spec_io.hpp"

using namespace svc::core;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("full service document parses and re-serializes byte-stably") {
  std::string text = R"(service Full {
  parameters {
    n: int input where n>0;
    kind: enum Kind {gold, silver} input;
    out: bool output;
  }
  attributes {
    version: int = 2;
  }
  context {
    rules {
      ctx.region==east;
    }
    info {
      Location: string = Montreal;
    }
  }
  contract {
    function {
      name DoFull;
      address "addr1";
      request_channel AskFull;
      response_channel FullDone;
      inputs { n, kind }
      result RFull;
      outputs { out }
      pre {
        n>0;
      }
      post {
        out==true;
      }
      post_observable false;
    }
    nonfunctional {
      safety_time 12;
      safety_data {
        n<100;
      }
      security { tls }
      reliability 99;
      availability 4;
      price {
        amount 60;
        currency dollar;
        unit hour;
        usage n;
      }
      trust {
        ce {
          alice: 4;
        }
        pg true;
        re {
          iso: 5;
        }
      }
    }
    legal {
      deposit := 300;
      kind==gold;
    }
  }
}
)";
  ConfiguredService s = parse_service_spec(text);
  CHECK(s.name == "Full");
  // deposit in legal stays an assignment target without a declaration
  CHECK(s.params.size() == 3);
  std::string out = serialize_service(s);
  CHECK(out == text);
  // round-trip again: parse(serialize(x)) == x
  CHECK(service_equal(parse_service_spec(out), s));
}

TEST_CASE("channels default to function-name derivation when omitted") {
  ConfiguredService s = parse_service_spec(R"(
service P {
  parameters { i: bool input; o: bool output; }
  contract {
    function { name Go; address "p"; inputs { i } result R; outputs { o } }
  }
}
)");
  CHECK(s.contract.function.request_channel.empty());
  CHECK(s.contract.function.response_channel.empty());
}

TEST_CASE("duplicate parameters are a parse error") {
  CHECK_THROWS_AS(parse_service_spec(R"(
service D {
  parameters { x: int input; x: bool input; }
  contract { function { name F; address "d"; inputs {} result R; outputs {} } }
}
)"),
                  ParseError);
}

TEST_CASE("parse errors carry line information") {
  try {
    parse_service_spec("service X {\n  bogus {\n}\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("catalog parsing rejects duplicate service names") {
  std::string one = R"(
service S {
  parameters { i: bool input; }
  contract { function { name F; address "s"; inputs { i } result R; outputs {} } }
}
)";
  CHECK_THROWS_AS(parse_catalog(one + one), ParseError);
}

TEST_CASE("catalog fixture files load") {
  auto roadside = parse_catalog(slurp(std::string(FIXTURES_DIR) + "/roadside.svc"));
  CHECK(roadside.size() == 3);
  CHECK(roadside.count("RepairShop"));
  CHECK(roadside.at("RepairShop").contract.function.request_channel ==
        "ScheduleApt");
  auto letters = parse_catalog(slurp(std::string(FIXTURES_DIR) + "/letters.svc"));
  CHECK(letters.size() == 6);
}
