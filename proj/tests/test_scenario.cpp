#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "doctest.h"
#include "leofl/scenario.hpp"

using namespace leofl::sim;
using nlohmann::json;

TEST_CASE("every preset validates") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const Scenario s = preset(name);
    CHECK_NOTHROW(s.validate());
    CHECK(s.name == name);
  }
  CHECK_THROWS_AS(preset("nope"), std::invalid_argument);
}

TEST_CASE("topology preset geometry") {
  const Scenario s = preset("table1");
  CHECK(s.constellation.num_planes == 6);
  CHECK(s.constellation.total_satellites == 50);
  CHECK(s.haps.size() == 2);
  CHECK(s.ground_station.kind == leofl::orbital::AssetKind::ground_station);
}

TEST_CASE("scheme names round-trip") {
  for (auto sc : {Scheme::proposed, Scheme::async_baseline, Scheme::sync_baseline, Scheme::ideal, Scheme::no_injection})
    CHECK(scheme_from_string(to_string(sc)) == sc);
  CHECK_THROWS_AS(scheme_from_string("fedprox"), std::invalid_argument);
}

TEST_CASE("scenario json round-trip is lossless") {
  for (const auto& name : preset_names()) {
    Scenario s = preset(name);
    s.seed = 99;
    s.scheme = Scheme::no_injection;
    s.continue_training = true;
    s.aggregation.nu = 2.5e-4;
    const json j = scenario_to_json(s);
    CHECK(j.at("schema") == kScenarioSchema);
    const Scenario back = scenario_from_json(j);
    CHECK(scenario_to_json(back) == j);
  }
}

TEST_CASE("json overlays onto a preset") {
  const json j = {{"schema", 1},
                  {"preset", "desk"},
                  {"seed", 5},
                  {"scheme", "async-baseline"},
                  {"aggregation", {{"gamma", 0.002}}},
                  {"constellation", {{"inclination_deg", 53.0}}}};
  const Scenario s = scenario_from_json(j);
  CHECK(s.seed == 5);
  CHECK(s.scheme == Scheme::async_baseline);
  CHECK(s.aggregation.nu == 0.002);
  CHECK(s.constellation.inclination == doctest::Approx(53.0 * std::numbers::pi / 180.0));
  CHECK(s.learning.local.lr == preset("desk").learning.local.lr);
}

TEST_CASE("json without a schema version is rejected") {
  CHECK_THROWS_AS(scenario_from_json(json{{"seed", 1}}), std::invalid_argument);
  CHECK_THROWS_AS(scenario_from_json(json{{"schema", 2}}), std::invalid_argument);
}

TEST_CASE("invalid values are rejected") {
  CHECK_THROWS(scenario_from_json(json{{"schema", 1}, {"scheme", "nope"}}));
  CHECK_THROWS(scenario_from_json(json{{"schema", 1}, {"tiers", {1.5}}}));
  CHECK_THROWS(scenario_from_json(json{{"schema", 1}, {"horizon_s", -1.0}}));
  CHECK_THROWS(scenario_from_json(json{{"schema", 1}, {"learning", {{"alpha_inject", 0.0}}}}));
  CHECK_THROWS(scenario_from_json(json{{"schema", 1}, {"haps", json::array()}}));
}

TEST_CASE("tiers cycle over satellites") {
  Scenario s = preset("desk");
  s.tiers = {1.0, 0.25};
  CHECK(s.tier_of(0) == 1.0);
  CHECK(s.tier_of(1) == 0.25);
  CHECK(s.tier_of(4) == 1.0);
}

TEST_CASE("scenario files load from disk") {
  const std::string path = "test_scenario_tmp.json";
  {
    std::ofstream out(path);
    out << json{{"schema", 1}, {"preset", "zenith"}, {"horizon_s", 600}}.dump();
  }
  const Scenario s = load_scenario(path);
  CHECK(s.horizon == 600.0);
  CHECK(s.haps.size() == 1);
  std::remove(path.c_str());
  CHECK_THROWS(load_scenario("/nonexistent/scenario.json"));
}
