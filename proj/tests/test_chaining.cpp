#include "doctest.h"
#include "ucnc/chaining.hpp"

#include <random>
#include <set>

using namespace ucnc;

namespace {

ServiceFunction fn(Rational r, Rational xi, std::vector<NodeIndex> hosts) {
  return ServiceFunction{std::move(r), std::move(xi), std::move(hosts), {}};
}

Network line(std::size_t n, bool all_compute = true) {
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back({"n" + std::to_string(i), Rational(all_compute ? 1 : 0)});
  std::vector<Link> links;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    links.push_back({i, i + 1, Rational(1)});
    links.push_back({i + 1, i, Rational(1)});
  }
  return Network(std::move(nodes), std::move(links));
}

}  // namespace

TEST_CASE("scaling profile with identity functions") {
  const ServiceChain chain{"id", {fn(1, 1, {0}), fn(1, 1, {0})}};
  const ScalingProfile p(chain);
  CHECK(p.w_values() == std::vector<Rational>{1, 1, 1});
  CHECK(p.x_values() == std::vector<Rational>{1, 1});
}

TEST_CASE("scaling profile with decreasing output") {
  const ServiceChain chain{"two", {fn(Rational(1, 10), 1, {0}), fn(2, Rational(4, 5), {0})}};
  const ScalingProfile p(chain);
  CHECK(p.w_values() == std::vector<Rational>{1, 1, Rational(4, 5)});
  CHECK(p.x_values() == std::vector<Rational>{Rational(1, 10), 2});
}

TEST_CASE("scaling profile of a single expanding function") {
  const ScalingProfile p(ServiceChain{"one", {fn(3, 2, {0})}});
  CHECK(p.w_values() == std::vector<Rational>{1, 2});
  CHECK(p.x_values() == std::vector<Rational>{3});
}

TEST_CASE("host-specific compute requirement only changes that host") {
  ServiceChain chain{"loc", {fn(1, 2, {0, 1}), fn(3, 1, {0, 1})}};
  chain.functions[1].host_compute[1] = 5;
  const ScalingProfile p(chain);
  CHECK(p.x(2) == 6);
  CHECK(p.x_at(2, 0) == 6);
  CHECK(p.x_at(2, 1) == 10);
  CHECK(p.x_at(1, 1) == 1);
}

TEST_CASE("validate_chain rejects bad functions") {
  const Network net = line(3, false);
  const Network compute = line(3);
  CHECK_THROWS_AS(validate_chain(ServiceChain{"c", {fn(1, 1, {0})}}, net), ValidationError);
  CHECK_THROWS_AS(validate_chain(ServiceChain{"c", {fn(0, 1, {0})}}, compute), ValidationError);
  CHECK_THROWS_AS(validate_chain(ServiceChain{"c", {fn(1, -1, {0})}}, compute), ValidationError);
  CHECK_THROWS_AS(validate_chain(ServiceChain{"c", {fn(1, 1, {})}}, compute), ValidationError);
  CHECK_THROWS_AS(validate_chain(ServiceChain{"c", {fn(1, 1, {7})}}, compute), ValidationError);
  CHECK_NOTHROW(validate_chain(ServiceChain{"c", {}}, net));
}

TEST_CASE("empty chain gives a single-layer copy of the network") {
  const Network net = abilene_preset();
  const LayeredGraph lg(net, ServiceChain{"fwd", {}});
  CHECK(lg.layer_count() == 1);
  CHECK(lg.node_count() == net.node_count());
  CHECK(lg.transmission_edge_count() == net.arc_count());
  CHECK(lg.computation_edge_count() == 0);
}

TEST_CASE("single computation node yields one computation edge") {
  std::vector<Node> nodes{{"s", 0}, {"u", 1}, {"d", 0}};
  const Network net(nodes, {{0, 1, 1}, {1, 2, 1}});
  const LayeredGraph lg(net, ServiceChain{"c", {fn(1, 1, {1})}});
  REQUIRE(lg.computation_edge_count() == 1);
  const auto& e = lg.edge(*lg.computation_edge(1, 1));
  CHECK(e.from == lg.node(1, 0));
  CHECK(e.to == lg.node(1, 1));
  CHECK_FALSE(lg.computation_edge(1, 0).has_value());
}

TEST_CASE("abilene layered graph with a two-function chain") {
  const Network net = abilene_preset();
  const LayeredGraph lg(net, ServiceChain{"c", {fn(1, 1, {2, 7}), fn(1, 1, {2, 7})}});
  CHECK(lg.node_count() == 33);
  CHECK(lg.transmission_edge_count() == 3 * net.link_count());
  CHECK(lg.computation_edge_count() == 4);
}

TEST_CASE("random layered graphs match the closed-form counts and never go back a layer") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 6;
    std::vector<Node> nodes;
    for (std::size_t u = 0; u < n; ++u) nodes.push_back({std::to_string(u), Rational(1)});
    std::vector<Link> links;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = 0; v < n; ++v) {
        if (u != v && rng() % 3 == 0) links.push_back({u, v, Rational(1)});
      }
    }
    const Network net(nodes, links);
    ServiceChain chain{"r", {}};
    const std::size_t m = rng() % 4;
    std::size_t host_total = 0;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<NodeIndex> hosts;
      for (std::size_t u = 0; u < n; ++u) {
        if (rng() % 2 == 0) hosts.push_back(u);
      }
      if (hosts.empty()) hosts.push_back(rng() % n);
      host_total += hosts.size();
      chain.functions.push_back(fn(1, 1, hosts));
    }
    const LayeredGraph lg(net, chain);
    CHECK(lg.node_count() == n * (m + 1));
    CHECK(lg.transmission_edge_count() == links.size() * (m + 1));
    CHECK(lg.computation_edge_count() == host_total);
    for (const auto& e : lg.edges()) {
      CHECK(lg.layer_of(e.to) >= lg.layer_of(e.from));
      if (e.kind == EdgeKind::kComputation) CHECK(lg.layer_of(e.to) == lg.layer_of(e.from) + 1);
    }
  }
}

TEST_CASE("map_to_physical reads a path edge by edge") {
  // s=0, u=1, d=2 on a directed line; function 1 at u.
  std::vector<Node> nodes{{"s", 0}, {"u", 1}, {"d", 0}};
  const Network net(nodes, {{0, 1, 1}, {1, 2, 1}});
  const LayeredGraph lg(net, ServiceChain{"c", {fn(1, 1, {1})}});
  const Route route{0, RouteKind::kPath,
                    {lg.transmission_edge(0, 0), *lg.computation_edge(1, 1), lg.transmission_edge(1, 1)}};
  CHECK_FALSE(route_violation(lg, route, 0, std::vector<NodeIndex>{2}).has_value());
  const auto actions = map_to_physical(lg, route);
  REQUIRE(actions.size() == 3);
  CHECK(actions[0].kind == ActionKind::kTransmit);
  CHECK(actions[0].node == 0);
  CHECK(actions[0].next == 1);
  CHECK(actions[0].stage == 0);
  CHECK(actions[1].kind == ActionKind::kProcess);
  CHECK(actions[1].node == 1);
  CHECK(actions[1].function == 1);
  CHECK(actions[2].kind == ActionKind::kTransmit);
  CHECK(actions[2].node == 1);
  CHECK(actions[2].next == 2);
  CHECK(actions[2].stage == 1);
}

TEST_CASE("a branch after processing maps to one duplication") {
  // s=0 -> v=1 (host) -> {a=2, b=3}.
  std::vector<Node> nodes{{"s", 0}, {"v", 1}, {"a", 0}, {"b", 0}};
  const Network net(nodes, {{0, 1, 1}, {1, 2, 1}, {1, 3, 1}});
  const LayeredGraph lg(net, ServiceChain{"c", {fn(1, 1, {1})}});
  const std::vector<EdgeId> edges{lg.transmission_edge(0, 0), *lg.computation_edge(1, 1),
                                  lg.transmission_edge(1, 1), lg.transmission_edge(2, 1)};
  const Route route = make_route(lg, 0, lg.node(0, 0), edges);
  CHECK(route.kind == RouteKind::kArborescence);
  CHECK_FALSE(route_violation(lg, route, 0, std::vector<NodeIndex>{2, 3}).has_value());
  const auto actions = map_to_physical(lg, route);
  std::size_t duplications = 0;
  for (std::size_t k = 0; k < actions.size(); ++k) {
    if (actions[k].kind != ActionKind::kDuplicate) continue;
    ++duplications;
    CHECK(actions[k].node == 1);
    CHECK(actions[k].stage == 1);
    CHECK(actions[k].copies == 2);
    REQUIRE(k > 0);
    CHECK(actions[k - 1].kind == ActionKind::kProcess);
  }
  CHECK(duplications == 1);
  // Every non-duplication action corresponds to exactly one route edge.
  std::multiset<EdgeId> mapped;
  for (const auto& a : actions) {
    if (a.kind != ActionKind::kDuplicate) mapped.insert(a.edge);
  }
  CHECK(mapped == std::multiset<EdgeId>(edges.begin(), edges.end()));
}

TEST_CASE("route_violation catches broken routes") {
  std::vector<Node> nodes{{"s", 0}, {"u", 1}, {"d", 0}};
  const Network net(nodes, {{0, 1, 1}, {1, 2, 1}, {1, 0, 1}});
  const LayeredGraph lg(net, ServiceChain{"c", {fn(1, 1, {1})}});
  const std::vector<NodeIndex> d{2};
  // Skips processing: ends at d^(0).
  CHECK(route_violation(lg, Route{0, RouteKind::kPath, {lg.transmission_edge(0, 0), lg.transmission_edge(1, 0)}},
                        0, d)
            .has_value());
  // Revisits s^(0).
  CHECK(route_violation(lg,
                        Route{0, RouteKind::kPath,
                              {lg.transmission_edge(0, 0), lg.transmission_edge(2, 0), lg.transmission_edge(0, 0),
                               *lg.computation_edge(1, 1), lg.transmission_edge(1, 1)}},
                        0, d)
            .has_value());
  // Nonexistent edge id.
  CHECK(route_violation(lg, Route{0, RouteKind::kPath, {lg.edge_count()}}, 0, d).has_value());
}

TEST_CASE("route_load applies the scalings per link and node") {
  std::vector<Node> nodes{{"a", 1}, {"b", 1}};
  const Network net(nodes, {{0, 1, 1}, {1, 0, 1}});
  const ServiceChain chain{"two", {fn(Rational(1, 10), 1, {0, 1}), fn(2, Rational(4, 5), {0, 1})}};
  const LayeredGraph lg(net, chain);
  const ScalingProfile p(chain);
  // a->b at stage 0, process 1 at b, b->a at stage 1, process 2 at a, a->b at stage 2.
  const Route route{0, RouteKind::kPath,
                    {lg.transmission_edge(0, 0), *lg.computation_edge(1, 1), lg.transmission_edge(1, 1),
                     *lg.computation_edge(2, 0), lg.transmission_edge(0, 2)}};
  const RouteLoad load = route_load(lg, p, route);
  CHECK(load.link.at(0) == Rational(9, 5));
  CHECK(load.link.at(1) == 1);
  CHECK(load.node.at(1) == Rational(1, 10));
  CHECK(load.node.at(0) == 2);
}

TEST_CASE("chain json round trip") {
  const Network net = abilene_preset();
  ServiceChain chain{"phi", {fn(Rational(1, 3), Rational(1, 3), {2, 7}), fn(2, 3, {7})}};
  chain.functions[0].host_compute[7] = Rational(1, 2);
  const ServiceChain back = chain_from_json(chain_to_json(chain, net), net);
  REQUIRE(back.length() == 2);
  CHECK(back.id == "phi");
  CHECK(back.function(1).compute_per_unit == Rational(1, 3));
  CHECK(back.function(1).scale == Rational(1, 3));
  CHECK(back.function(1).hosts == std::vector<NodeIndex>{2, 7});
  CHECK(back.function(1).host_compute.at(7) == Rational(1, 2));
  CHECK(back.function(2).scale == 3);
}
