#include "doctest.h"
#include "ucnc/harness.hpp"

#include <set>

using namespace ucnc;

TEST_CASE("policy names round trip") {
  for (Policy p : all_policies()) CHECK(parse_policy(policy_name(p)) == p);
  CHECK(policy_name(Policy::kUcncEnto) == "ucnc-ento");
  CHECK_THROWS_AS(parse_policy("backpressure"), std::invalid_argument);
}

TEST_CASE("presets reconstruct the experiments") {
  const std::vector<std::string> names{"abilene-2uc", "abilene-shrink", "abilene-expand", "abilene-mc", "mixed-18"};
  CHECK(preset_names() == names);
  for (const auto& name : names) CHECK_NOTHROW(validate_scenario(preset(name)));

  const Scenario uc = preset("abilene-2uc");
  REQUIRE(uc.commodities.size() == 2);
  CHECK(uc.net == abilene_preset());
  CHECK(uc.chains[0].length() == 2);

  const Scenario shrink = preset("abilene-shrink");
  CHECK(shrink.chains[0].function(1).scale == Rational(1, 3));
  CHECK(shrink.chains[0].function(1).compute_per_unit == Rational(1, 3));
  CHECK(shrink.net.node(shrink.commodities[0].source).name == "2");
  CHECK(shrink.net.node(shrink.commodities[0].destinations[0]).name == "7");

  const Scenario expand = preset("abilene-expand");
  CHECK(expand.chains[0].function(1).scale == 3);
  CHECK(expand.chains[0].function(1).compute_per_unit == 1);

  const Scenario mc = preset("abilene-mc");
  REQUIRE(mc.commodities.size() == 1);
  CHECK(mc.commodities[0].destinations.size() == 2);

  CHECK_THROWS(preset("nope"));
}

TEST_CASE("mixed preset draws its scalings in range") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Scenario s = preset("mixed-18", seed);
    CHECK(s.commodities.size() == 18);
    CHECK(s.chains.size() == 3);
    std::size_t multicast = 0;
    for (const auto& c : s.commodities) multicast += c.destinations.size() > 1;
    CHECK(multicast == 6);
    for (const auto& chain : s.chains) {
      for (const auto& f : chain.functions) {
        CHECK(f.scale >= Rational(1, 2));
        CHECK(f.scale <= 2);
        CHECK(f.compute_per_unit >= Rational(1, 2));
        CHECK(f.compute_per_unit <= 2);
        CHECK(f.hosts.size() == 4);
      }
    }
    CHECK(split_multicast(s).commodities.size() == 24);
  }
  CHECK(scenario_to_json(preset("mixed-18", 4)) == scenario_to_json(preset("mixed-18", 4)));
  CHECK(scenario_to_json(preset("mixed-18", 4)) != scenario_to_json(preset("mixed-18", 5)));
}

TEST_CASE("multicast split into unicast commodities") {
  const Scenario mc = preset("abilene-mc");
  const auto parts = multicast_as_unicast(mc.commodities[0]);
  REQUIRE(parts.size() == 2);
  CHECK(mc.net.node(parts[0].destinations[0]).name == "7");
  CHECK(mc.net.node(parts[1].destinations[0]).name == "11");
  for (const auto& p : parts) {
    CHECK(p.source == mc.commodities[0].source);
    CHECK(p.rate == mc.commodities[0].rate);
    CHECK(p.chain == mc.commodities[0].chain);
  }
  Commodity three{"t", 0, {4, 5, 6}, 0, 1};
  CHECK(multicast_as_unicast(three).size() == 3);
  CHECK_THROWS_AS(multicast_as_unicast(Commodity{"u", 0, {4}, 0, 1}), std::invalid_argument);
}

TEST_CASE("nearest compute nodes") {
  const Scenario shrink = preset("abilene-shrink");
  auto model = make_service_model(shrink.net, shrink.chains, shrink.commodities);
  CHECK(shrink.net.node(nearest_compute_node(*model, 0, true)).name == "8");

  const Scenario expand = preset("abilene-expand");
  model = make_service_model(expand.net, expand.chains, expand.commodities);
  CHECK(expand.net.node(nearest_compute_node(*model, 0, false)).name == "3");
  const Route r = nearest_route(*model, 0, false);
  for (const auto& a : map_to_physical(model->graph_of(0), r)) {
    if (a.kind == ActionKind::kProcess) CHECK(expand.net.node(a.node).name == "3");
  }

  // Source on the only compute node: both flavors agree.
  Scenario co = expand;
  co.commodities[0].source = co.net.node_index("3");
  for (auto& f : co.chains[0].functions) f.hosts = {co.net.node_index("3")};
  model = make_service_model(co.net, co.chains, co.commodities);
  CHECK(nearest_compute_node(*model, 0, false) == nearest_compute_node(*model, 0, true));
  CHECK(nearest_route(*model, 0, false).edges == nearest_route(*model, 0, true).edges);
}

TEST_CASE("config documents round trip") {
  for (const auto& name : preset_names()) {
    const Scenario s = preset(name);
    const Scenario back = scenario_from_json(scenario_to_json(s));
    CHECK(scenario_to_json(back) == scenario_to_json(s));
  }
  const std::string text = R"({
    "topology_preset": "abilene",
    "chains": [{"id": "phi", "functions": [{"r": "1/3", "xi": "1/3", "hosts": ["3", "8"]}]}],
    "commodities": [{"id": "c1", "source": "2", "destination": "7", "chain": "phi", "rate": 1}],
    "scenario": {"name": "x", "policy": "nearest-to-destination", "horizon": 50, "seeds": [4, 5],
                 "lambda_grid": [0.5, 1.0]}
  })";
  const Scenario s = load_scenario(text);
  CHECK(s.policy == Policy::kNearestToDestination);
  CHECK(s.horizon == 50);
  CHECK(s.seeds == std::vector<std::uint64_t>{4, 5});
  CHECK(s.chains[0].function(1).scale == Rational(1, 3));
  CHECK_THROWS(load_scenario(R"({"topology_preset": "abilene", "chains": [],
      "commodities": [{"id": "c", "source": "2", "destination": "7", "chain": "none", "rate": 1}]})"));
  CHECK_THROWS(load_scenario(R"({"topology_preset": "abilene", "scenario": {"lambda_grid": [1.0, 0.5]}})"));
}

TEST_CASE("zero horizon gives empty metrics") {
  Scenario s = preset("abilene-2uc");
  s.horizon = 0;
  const RunResult r = run(s, 0.45, 1);
  REQUIRE(r.rows.size() == 2);
  for (const auto& row : r.rows) {
    CHECK(row.throughput == 0.0);
    CHECK_FALSE(row.mean_delay.has_value());
    CHECK(row.delivered == 0);
    CHECK(row.vq_sum_final == 0.0);
  }
}

TEST_CASE("short runs deliver at the offered rate and are reproducible") {
  Scenario s = preset("abilene-2uc");
  s.horizon = 4000;
  const RunResult a = run(s, 0.3, 7);
  const RunResult b = run(s, 0.3, 7);
  CHECK(to_csv(a.rows) == to_csv(b.rows));
  for (const auto& row : a.rows) {
    CHECK(row.throughput == doctest::Approx(0.3).epsilon(0.1));
    CHECK(row.mean_delay.has_value());
  }
  CHECK(to_csv(run(s, 0.3, 8).rows) != to_csv(a.rows));
}

TEST_CASE("every policy runs on the multicast scenario") {
  Scenario s = preset("abilene-mc");
  s.horizon = 500;
  for (Policy p : all_policies()) {
    s.policy = p;
    RunOptions options;
    options.audit = true;
    const RunResult r = run(s, 0.3, 1, options);
    CHECK(r.audit.order_violations == 0);
    CHECK(r.audit.work_conservation_violations == 0);
    CHECK(r.rows.size() == (p == Policy::kMulticastAsUnicast ? 2u : 1u));
    for (const auto& row : r.rows) CHECK(row.policy == policy_name(p));
  }
}

TEST_CASE("sweep orders rows and rejects empty inputs") {
  Scenario s = preset("abilene-2uc");
  s.horizon = 300;
  const std::vector<Policy> policies{Policy::kUcncFifo, Policy::kUcncEnto};
  const auto rows = sweep(s, policies, {0.2, 0.4}, {2, 1}, 3);
  REQUIRE(rows.size() == 2 * 2 * 2 * 2);
  CHECK(rows.front().policy == "ucnc-ento");
  CHECK(rows.front().lambda_multiplier == 0.2);
  CHECK(rows.front().seed == 1);
  CHECK(rows.back().policy == "ucnc-fifo");
  CHECK(rows.back().seed == 2);
  CHECK(to_csv(sweep(s, policies, {0.2, 0.4}, {2, 1}, 1)) == to_csv(rows));
  CHECK_THROWS(sweep(s, policies, {0.2}, {}, 1));
  CHECK_THROWS(sweep(s, policies, {}, {1}, 1));
  CHECK_THROWS(sweep(s, {}, {0.2}, {1}, 1));
}

TEST_CASE("csv format") {
  CHECK(csv_header() ==
        "policy,lambda_multiplier,seed,commodity_id,throughput,mean_delay,delivered,vq_sum_final,max_backlog,"
        "growth_slope");
  std::vector<CsvRow> rows{{"ucnc-ento", 0.5, 3, "c1", 0.25, 4.5, 10, 1.5, 2.0, 0.001},
                           {"ucnc-fifo", 0.5, 3, "c2", 0.0, std::nullopt, 0, 0.0, 0.0, 0.0}};
  const std::string text = to_csv(rows);
  CHECK(text.rfind(csv_header() + "\n", 0) == 0);
  const auto back = parse_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].commodity_id == "c1");
  CHECK(back[0].mean_delay.value() == 4.5);
  CHECK_FALSE(back[1].mean_delay.has_value());
  CHECK(to_csv(back) == text);
  const std::string plot = gnuplot_columns(rows);
  CHECK(plot.find("ucnc-ento") != std::string::npos);
  CHECK(plot.find("ucnc-fifo") != std::string::npos);
}
