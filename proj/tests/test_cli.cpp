#include <doctest.h>

#include <cmath>
#include <sstream>

#include <carnot/config.hpp>
#include <carnot/errors.hpp>
#include <carnot/serialize.hpp>

#include "commands.hpp"

using namespace carnot;
using namespace carnot::cli;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

const char* kMinimal = R"({
  "version": 1,
  "name": "mini",
  "n": 3,
  "kind": "SR",
  "generators": [["1", "0", "0"], ["0", "1", "x1"]],
  "q": ["0", "0", "0"]
})";

}  // namespace

TEST_CASE("bundled configs round-trip") {
  for (const auto& name : example_names()) {
    CAPTURE(name);
    const auto c = example_config(name);
    const auto text = config_to_json(c);
    const auto back = parse_config(text);
    CHECK(back == c);
    CHECK(config_to_json(back) == text);
    CHECK(Json::parse(text)["version"] == kConfigVersion);
  }
}

TEST_CASE("config errors carry line numbers") {
  CHECK(parse_config(kMinimal).name == "mini");

  std::string v = kMinimal;
  v.replace(v.find("\"version\": 1"), 12, "\"version\": 7");
  const auto ve = config_error(v);
  CHECK(ve.find("cfg.json:2:") != std::string::npos);
  CHECK(ve.find("version") != std::string::npos);

  std::string u = kMinimal;
  u.replace(u.find("\"q\""), 3, "\"bogus\": 1,\n  \"q\"");
  CHECK(config_error(u).find("cfg.json:7:") != std::string::npos);

  std::string s = kMinimal;
  s.replace(s.find("\"n\": 3,"), 7, "\"n\": 3");
  CHECK(config_error(s).find("cfg.json:") != std::string::npos);

  std::string k = kMinimal;
  k.replace(k.find("\"SR\""), 4, "\"XY\"");
  CHECK(config_error(k).find("unknown kind") != std::string::npos);

  std::string noversion = kMinimal;
  noversion.replace(noversion.find("\"version\": 1,"), 13, "");
  config_error(noversion);

  CHECK_THROWS_AS(example_config("nope"), Error);
  const auto r = cmd_examples("heisenberg");
  CHECK(r.files.count("heisenberg.json") == 1);
  CHECK(parse_config(r.files.at("heisenberg.json")) == example_config("heisenberg"));
}

TEST_CASE("overrides") {
  Overrides o;
  o.seed = 99;
  o.eps = 0.05;
  o.samples = 10;
  const auto c = apply(example_config("heisenberg"), o);
  CHECK(c.seed == 99);
  CHECK(c.eps == 0.05);
  CHECK(c.samples == 10);
  CHECK(c.horizon == example_config("heisenberg").horizon);
}

TEST_CASE("analyze reports growth vectors") {
  const auto h = cmd_analyze(example_config("heisenberg"));
  CHECK(h.exit_code == kExitPass);
  CHECK(h.report["flag"]["growth"] == Json::array({2, 3}));
  CHECK(h.report["flag"]["r"] == 2);
  CHECK(h.report["privileged"]["all_pass"] == true);
  const auto g = cmd_analyze(example_config("grushin"));
  CHECK(g.report["flag"]["growth"] == Json::array({1, 2}));
  const auto d = cmd_analyze(example_config("heisenberg-drift"));
  CHECK(d.report["drift"]["s"] == 2);
}

TEST_CASE("approx on nilpotent systems is the identity") {
  const auto h = cmd_approx(example_config("heisenberg"));
  CHECK(h.report["nilpotent_equals_system"] == true);
  const auto d = cmd_approx(example_config("heisenberg-drift"));
  CHECK(d.report["series"]["rho"] == 0);
  CHECK(d.report["series_higher_terms_zero"] == true);
}

TEST_CASE("reach clouds") {
  Overrides o;
  o.eps = 0.0;
  o.samples = 25;
  const auto z = cmd_reach(example_config("heisenberg-drift"), o);
  CHECK(z.exit_code == kExitPass);
  std::istringstream csv(z.files.at("reach.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "x1,x2,x3,cost,T_used,seed,segments,ok,error\r");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::vector<std::string> cols;
    std::stringstream ss(line.substr(0, line.size() - 1));
    for (std::string f; std::getline(ss, f, ',');) cols.push_back(f);
    REQUIRE(cols.size() >= 5);
    CHECK(std::stod(cols[0]) == 0.0);
    CHECK(std::stod(cols[1]) == 0.0);
    CHECK(std::abs(std::stod(cols[2]) - std::stod(cols[4])) < 1e-12);
  }
  CHECK(rows == 25);

  o.eps = 0.2;
  o.samples = 200;
  const auto a = cmd_reach(example_config("heisenberg"), o);
  const auto b = cmd_reach(example_config("heisenberg"), o);
  CHECK(a.files.at("reach.csv") == b.files.at("reach.csv"));
  CHECK(dump(a.report) == dump(b.report));
  o.threads = 4;
  CHECK(cmd_reach(example_config("heisenberg"), o).files.at("reach.csv") == a.files.at("reach.csv"));
}

TEST_CASE("csv quoting") {
  CsvWriter w({"a", "b"});
  w.row(std::vector<std::string>{"plain", "with,comma"});
  w.row(std::vector<std::string>{"say \"hi\"", "two\nlines"});
  CHECK(w.str() == "a,b\r\nplain,\"with,comma\"\r\n\"say \"\"hi\"\"\",\"two\nlines\"\r\n");
  CHECK_THROWS(w.row(std::vector<std::string>{"only one"}));
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(INFINITY) == "inf");
}

TEST_CASE("verification failures exit with code 2") {
  const auto bad = cmd_verify(example_config("heisenberg-wrong-weights"), "ballbox-sr");
  CHECK(bad.exit_code == kExitVerificationFailure);
  CHECK(bad.report["pass"] == false);
  CHECK_THROWS_AS(cmd_verify(example_config("heisenberg"), "no-such-theorem"), Error);
}

TEST_CASE("verify reports are reproducible") {
  const auto a = cmd_verify(example_config("heisenberg-drift"), "split");
  const auto b = cmd_verify(example_config("heisenberg-drift"), "split");
  CHECK(a.exit_code == kExitPass);
  CHECK(dump(a.report) == dump(b.report));
}
