#include <doctest.h>

#include <string>

#include "normscape/config.hpp"
#include "normscape/errors.hpp"

using namespace normscape;

namespace {

std::string error_of(auto f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("empty config gives defaults") {
    const auto doc = parse_config_text("{}");
    const auto abm = parse_abm_config(doc);
    CHECK(abm.sim.n_agents == 200);
    CHECK(abm.sim.periods == 200);
    CHECK(abm.failure_budget == kDefaultFailureBudget);
    CHECK_FALSE(doc.seed);
    const auto land = parse_landscape_config(doc, false);
    CHECK(land.grid.u_points == 51);
    CHECK(land.options.nodes == 5);
    const auto sweep = parse_sweep_config(doc);
    CHECK(sweep.spec.n_base == 512);
    CHECK(sweep.spec.dimension() == 5);
  }

  TEST_CASE("values are read") {
    const auto doc = parse_config_text(R"({
      "seed": 7,
      "n_agents": 50,
      "lambda": {"mu": 2.5},
      "topology": {"kind": "watts_strogatz", "mean_degree": 4},
      "qre": {"tolerance": 1e-8},
      "write_agents": false
    })");
    REQUIRE(doc.seed);
    CHECK(*doc.seed == 7);
    const auto c = parse_abm_config(doc);
    CHECK(c.sim.n_agents == 50);
    CHECK(c.sim.lambda.mu == 2.5);
    CHECK(c.sim.lambda.sigma == 0.5);
    CHECK(c.sim.topology.kind == Topology::WattsStrogatz);
    CHECK(c.sim.topology.mean_degree == 4);
    CHECK(c.sim.qre.tolerance == 1e-8);
    CHECK_FALSE(c.write_agents);
  }

  TEST_CASE("unknown fields are rejected with a line number") {
    const auto doc = parse_config_text("{\n  \"n_agents\": 10,\n  \"n_agnets\": 20\n}", "run.json");
    const std::string msg = error_of([&] { parse_abm_config(doc); });
    CHECK(msg.find("n_agnets") != std::string::npos);
    CHECK(msg.find("run.json:3") != std::string::npos);

    const auto nested = parse_config_text("{\n \"topology\": {\n  \"knd\": \"holme_kim\"\n }\n}");
    CHECK(error_of([&] { parse_abm_config(nested); }).find("topology.knd") != std::string::npos);
  }

  TEST_CASE("wrongly typed values are rejected") {
    const auto doc = parse_config_text("{\n\"waypoints\": [[1.0, 2.0], [\"x\", 3.0]]\n}");
    const std::string msg = error_of([&] { parse_landscape_config(doc, true); });
    CHECK(msg.find("waypoints[1]") != std::string::npos);
    CHECK(msg.find(":2") != std::string::npos);

    CHECK_THROWS_AS(parse_abm_config(parse_config_text(R"({"periods": -3})")), ConfigError);
    CHECK_THROWS_AS(parse_abm_config(parse_config_text(R"({"periods": 2.5})")), ConfigError);
    CHECK_THROWS_AS(parse_abm_config(parse_config_text(R"({"homophily": "high"})")), ConfigError);
    CHECK_THROWS_AS(parse_abm_config(parse_config_text(R"({"warmup": 300})")), ConfigError);
    CHECK_THROWS_AS(parse_landscape_config(parse_config_text("{}"), true), ConfigError);
    CHECK_THROWS_AS(parse_sweep_config(parse_config_text(R"({"n_base": 6})")), ConfigError);
    CHECK_THROWS_AS(
        parse_sweep_config(parse_config_text(R"({"parameters": [{"name": "beta"}]})")),
        ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"seed": -1})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[1, 2]"), ConfigError);
  }

  TEST_CASE("malformed json reports its line") {
    const std::string msg = error_of([] { parse_config_text("{\n\"a\": 1,\n\"b\": }\n", "bad.json"); });
    CHECK(msg.find("bad.json:3") != std::string::npos);
    CHECK_THROWS_AS(load_config_file("/nonexistent/config.json"), ConfigError);
  }

  TEST_CASE("configs round trip through json") {
    const auto doc = parse_config_text(R"({
      "utility": {"kind": "prospect", "omega": 3.0},
      "traits": {"mu_lambda": 0.5},
      "grid": {"u_points": 11, "v_points": 9},
      "waypoints": [[1.0, 0.5], [2.0, 1.5]]
    })");
    const auto a = parse_landscape_config(doc, true);
    const auto b = parse_landscape_config(parse_config_text(to_json(a, true).dump()), true);
    CHECK(to_json(a, true) == to_json(b, true));
    CHECK(b.family.kind == UtilityKind::Prospect);
    CHECK(b.family.omega == 3.0);
    CHECK(b.grid.v_points == 9);
    CHECK(b.waypoints.size() == 2);

    SweepRunConfig s;
    s.spec.n_base = 8;
    s.base.n_agents = 30;
    const auto s2 = parse_sweep_config(parse_config_text(to_json(s).dump()));
    CHECK(to_json(s2) == to_json(s));

    AbmRunConfig m;
    m.sim.homophily = 0.3;
    CHECK(to_json(parse_abm_config(parse_config_text(to_json(m).dump()))) == to_json(m));
  }

  TEST_CASE("manifests are accepted as configs") {
    AbmRunConfig c;
    c.sim.periods = 12;
    RunManifest m;
    m.command = "abm";
    m.config = to_json(c);
    m.seed = 99;
    m.version = "x";
    m.outputs = {"metrics.csv"};
    const auto doc = parse_config_text(to_json(m).dump(2));
    REQUIRE(doc.seed);
    CHECK(*doc.seed == 99);
    CHECK(parse_abm_config(doc).sim.periods == 12);
  }
}
