#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ucnc/harness.hpp"
#include "ucnc/oracle.hpp"
#include "ucnc/routing.hpp"

using namespace ucnc;

namespace {

Rational frac(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

constexpr double kStableSlope = 1e-3;
constexpr double kUnstableSlope = 1e-1;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAILED]");
    pass = pass && ok;
  }
};

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

std::shared_ptr<const ServiceModel> model_of(const Scenario& s) {
  return make_service_model(s.net, s.chains, s.commodities);
}

Rational theta_of(const Scenario& s) {
  const auto model = model_of(s);
  const RateVector dir(model->commodities.size(), Rational(1));
  return max_scalar_rate(*model, dir).theta;
}

double slope_at(Scenario s, Policy policy, double lambda, std::uint64_t seed = 1) {
  s.policy = policy;
  return run(s, lambda, seed).growth_slope;
}

Outcome capacity_boundary() {
  Outcome o;
  const Scenario s = preset("abilene-2uc");
  const Rational theta = theta_of(s);
  o.require(theta == Rational(1, 2), "theta*=" + to_string(theta));
  const RunResult inside = run(s, 0.45, 1);
  o.require(inside.growth_slope < kStableSlope, "slope(0.45)=" + fmt("%.2e", inside.growth_slope));
  for (const auto& row : inside.rows) {
    o.require(std::abs(row.throughput - 0.45) <= 0.05 * 0.45, row.commodity_id + " thr=" + fmt("%.4f", row.throughput));
  }
  const double outside = slope_at(s, Policy::kUcncEnto, 0.55);
  o.require(outside > kUnstableSlope, "slope(0.55)=" + fmt("%.3f", outside));
  return o;
}

Scenario restrict_hosts(Scenario s, const std::string& node) {
  for (auto& chain : s.chains) {
    for (auto& f : chain.functions) f.hosts = {s.net.node_index(node)};
  }
  return s;
}

Outcome flow_shrinkage() {
  Outcome o;
  const Scenario s = preset("abilene-shrink");
  const Rational full = theta_of(s);
  const Rational at8 = theta_of(restrict_hosts(s, "8"));
  o.require(full == 3, "theta*=" + to_string(full));
  o.require(at8 == 2, "theta*(node 8)=" + to_string(at8));
  const double ucnc = slope_at(s, Policy::kUcncEnto, 2.5);
  const double nearest = slope_at(s, Policy::kNearestToDestination, 2.5);
  o.require(ucnc < kStableSlope, "ucnc slope=" + fmt("%.2e", ucnc));
  o.require(nearest > kUnstableSlope, "nearest-to-destination slope=" + fmt("%.3f", nearest));
  return o;
}

Outcome flow_expansion() {
  Outcome o;
  const Scenario s = preset("abilene-expand");
  const Rational full = theta_of(s);
  const Rational at3 = theta_of(restrict_hosts(s, "3"));
  o.require(full == 1, "theta*=" + to_string(full));
  o.require(at3 == Rational(2, 3), "theta*(node 3)=" + to_string(at3));
  const double ucnc = slope_at(s, Policy::kUcncEnto, 0.8);
  const double nearest = slope_at(s, Policy::kNearestToSource, 0.8);
  o.require(ucnc < kStableSlope, "ucnc slope=" + fmt("%.2e", ucnc));
  o.require(nearest > kUnstableSlope, "nearest-to-source slope=" + fmt("%.3f", nearest));
  return o;
}

Outcome multicast_gain() {
  Outcome o;
  const Scenario s = preset("abilene-mc");
  const Rational mc = theta_of(s);
  const Rational split = theta_of(split_multicast(s));
  o.require(mc == 1, "theta*=" + to_string(mc));
  o.require(split == Rational(1, 2), "theta*(split)=" + to_string(split));
  const double ucnc = slope_at(s, Policy::kUcncEnto, 0.9);
  const double split_high = slope_at(s, Policy::kMulticastAsUnicast, 0.9);
  const double split_low = slope_at(s, Policy::kMulticastAsUnicast, 0.4);
  o.require(ucnc < kStableSlope, "multicast slope(0.9)=" + fmt("%.2e", ucnc));
  o.require(split_high > kUnstableSlope, "split slope(0.9)=" + fmt("%.3f", split_high));
  o.require(split_low < kStableSlope, "split slope(0.4)=" + fmt("%.2e", split_low));
  return o;
}

Outcome mixed_cast() {
  Outcome o;
  constexpr int kSeeds = 10;
  int gain = 0;
  int stable = 0;
  int unstable = 0;
  double worst_inside = 0.0;
  double weakest_outside = 1e300;
  for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
    const Scenario s = preset("mixed-18", seed);
    const Rational mc = theta_of(s);
    const Rational split = theta_of(split_multicast(s));
    if (mc > split) ++gain;
    const double theta = to_double(mc);
    const double inside = slope_at(s, Policy::kUcncEnto, 0.9 * theta, seed);
    const double outside = slope_at(s, Policy::kUcncEnto, 1.1 * theta, seed);
    stable += inside < kStableSlope;
    unstable += outside > kUnstableSlope;
    worst_inside = std::max(worst_inside, inside);
    weakest_outside = std::min(weakest_outside, outside);
    std::printf("  mixed-18 seed %llu: theta*=%.4f split=%.4f slope(0.9)=%.2e slope(1.1)=%.3f\n",
                static_cast<unsigned long long>(seed), theta, to_double(split), inside, outside);
    std::fflush(stdout);
  }
  o.require(gain * 10 >= kSeeds * 8, "multicast gain in " + std::to_string(gain) + "/" + std::to_string(kSeeds));
  o.require(stable == kSeeds, "stable at 0.9 in " + std::to_string(stable) + "/" + std::to_string(kSeeds) +
                                  " (max " + fmt("%.2e", worst_inside) + ")");
  o.require(unstable == kSeeds, "unstable at 1.1 in " + std::to_string(unstable) + "/" + std::to_string(kSeeds) +
                                    " (min " + fmt("%.3f", weakest_outside) + ")");
  return o;
}

// Small random instance: sparse digraph, short chain with random scalings and
// one commodity (unicast or multicast).
struct Instance {
  std::shared_ptr<const ServiceModel> model;
};

std::optional<Instance> random_instance(std::mt19937_64& rng, std::size_t max_nodes, std::size_t max_terminals,
                                        bool allow_multicast) {
  const std::size_t n = 3 + rng() % (max_nodes - 2);
  std::vector<Node> nodes;
  for (std::size_t u = 0; u < n; ++u) nodes.push_back({std::to_string(u), Rational(1 + static_cast<long>(rng() % 3))});
  std::vector<Link> links;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u != v && rng() % 100 < 35) links.push_back({u, v, Rational(1 + static_cast<long>(rng() % 3))});
    }
  }
  const Network net(nodes, links);
  ServiceChain chain{"r", {}};
  const std::size_t m = rng() % 3;
  for (std::size_t i = 0; i < m; ++i) {
    ServiceFunction f;
    f.compute_per_unit = frac(1 + static_cast<long>(rng() % 4), 1 + static_cast<long>(rng() % 3));
    f.scale = frac(1 + static_cast<long>(rng() % 4), 1 + static_cast<long>(rng() % 3));
    const std::size_t hosts = 1 + rng() % 2;
    for (std::size_t k = 0; k < hosts; ++k) {
      const NodeIndex h = rng() % n;
      if (std::find(f.hosts.begin(), f.hosts.end(), h) == f.hosts.end()) f.hosts.push_back(h);
    }
    std::sort(f.hosts.begin(), f.hosts.end());
    chain.functions.push_back(std::move(f));
  }
  Commodity c;
  c.id = "c";
  c.source = rng() % n;
  c.rate = 1;
  const std::size_t terminals = std::min(allow_multicast ? 1 + rng() % max_terminals : 1, m == 0 ? n - 1 : n);
  while (c.destinations.size() < terminals) {
    const NodeIndex d = rng() % n;
    if (d == c.source && m == 0) continue;
    if (std::find(c.destinations.begin(), c.destinations.end(), d) == c.destinations.end()) {
      c.destinations.push_back(d);
    }
  }
  std::sort(c.destinations.begin(), c.destinations.end());
  auto model = make_service_model(net, {chain}, {c});
  // Require reachability of every terminal.
  const auto& lg = model->graphs[0];
  std::vector<bool> seen(lg.node_count(), false);
  std::vector<LayeredNodeId> stack{lg.node(c.source, 0)};
  seen[stack.front()] = true;
  while (!stack.empty()) {
    const LayeredNodeId v = stack.back();
    stack.pop_back();
    for (EdgeId e : lg.out_edges(v)) {
      if (!seen[lg.edge(e).to]) {
        seen[lg.edge(e).to] = true;
        stack.push_back(lg.edge(e).to);
      }
    }
  }
  for (NodeIndex d : c.destinations) {
    if (!seen[lg.node(d, lg.chain_length())]) return std::nullopt;
  }
  return Instance{model};
}

std::vector<Rational> flow_of(const LayeredGraph& lg, const ScalingProfile& p, const std::vector<WeightedRoute>& rs) {
  std::vector<Rational> f(lg.edge_count());
  for (const auto& wr : rs) {
    const auto g = route_edge_flow(lg, p, wr.route, wr.weight);
    for (std::size_t e = 0; e < f.size(); ++e) f[e] += g[e];
  }
  return f;
}

// Nodes where generalized conservation need not hold for a route: the root,
// the terminals and every branch node.
std::set<LayeredNodeId> route_exempt(const LayeredGraph& lg, const Route& r, const Commodity& c) {
  std::set<LayeredNodeId> exempt{lg.node(c.source, 0)};
  for (NodeIndex d : c.destinations) exempt.insert(lg.node(d, lg.chain_length()));
  std::map<LayeredNodeId, int> out;
  for (EdgeId e : r.edges) ++out[lg.edge(e).from];
  for (auto [v, k] : out) {
    if (k > 1) exempt.insert(v);
  }
  return exempt;
}

Outcome oracle_soundness() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  int round_trips = 0, round_trip_failures = 0;
  int conservation_checks = 0, conservation_failures = 0;
  int perturbations = 0, perturbation_misses = 0;
  int witnesses = 0, witness_failures = 0;
  int attempts = 0;
  while (round_trips < 100 && attempts < 5000) {
    ++attempts;
    auto inst = random_instance(rng, 6, 3, true);
    if (!inst) continue;
    const ServiceModel& model = *inst->model;
    const Commodity& c = model.commodities[0];
    std::vector<Route> routes;
    try {
      routes = enumerate_routes(model, 0);
    } catch (const EnumerationLimitError&) {
      continue;
    }
    if (routes.empty()) continue;
    const auto& lg = model.graphs[0];
    const auto& profile = model.profiles[0];

    for (const auto& r : routes) {
      const auto exempt = route_exempt(lg, r, c);
      const auto f = route_edge_flow(lg, profile, r, 1);
      ++conservation_checks;
      if (!verify_conservation(lg, f, exempt).ok()) ++conservation_failures;
      if (r.edges.empty()) continue;
      auto bumped = f;
      const EdgeId e = r.edges[rng() % r.edges.size()];
      bumped[e] += Rational(1, 10);
      std::set<LayeredNodeId> expected;
      for (LayeredNodeId v : {lg.edge(e).from, lg.edge(e).to}) {
        if (!exempt.contains(v)) expected.insert(v);
      }
      std::set<LayeredNodeId> flagged;
      for (const auto& res : verify_conservation(lg, bumped, exempt).residuals) flagged.insert(res.node);
      ++perturbations;
      if (flagged != expected) ++perturbation_misses;
    }

    std::vector<WeightedRoute> combo;
    const std::size_t parts = 1 + rng() % 3;
    Rational left = 1;
    for (std::size_t k = 0; k < parts; ++k) {
      const Rational w = k + 1 == parts ? left : left * frac(1 + static_cast<long>(rng() % 4), 6);
      left -= w;
      combo.push_back({routes[rng() % routes.size()], w});
    }
    const auto flow = flow_of(lg, profile, combo);
    ++round_trips;
    try {
      const auto dec = decompose_flow(lg, flow, c.source, c.destinations);
      Rational sum = 0;
      bool ok = true;
      for (const auto& wr : dec.routes) {
        sum += wr.weight;
        ok = ok && sgn(wr.weight) > 0 && !route_violation(lg, wr.route, c.source, c.destinations).has_value();
      }
      if (!ok || sum != 1 || flow_of(lg, profile, dec.routes) != flow) ++round_trip_failures;
    } catch (const std::exception&) {
      ++round_trip_failures;
    }

    const RateVector rate{frac(1 + static_cast<long>(rng() % 8), 4)};
    const auto feas = capacity_feasible(model, rate);
    if (feas.feasible) {
      ++witnesses;
      if (check_witness(model, rate, *feas.witness).has_value()) ++witness_failures;
    }
  }
  for (const char* name : {"abilene-2uc", "abilene-shrink", "abilene-expand", "abilene-mc"}) {
    const Scenario s = preset(name);
    const auto model = model_of(s);
    const RateVector dir(model->commodities.size(), Rational(1));
    const Rational theta = max_scalar_rate(*model, dir).theta;
    for (const Rational& scale : {Rational(1, 4), Rational(1, 2), Rational(1)}) {
      RateVector r;
      for (const auto& d : dir) r.push_back(theta * scale * d);
      const auto feas = capacity_feasible(*model, r);
      ++witnesses;
      if (!feas.feasible || check_witness(*model, r, *feas.witness).has_value()) ++witness_failures;
    }
  }
  o.require(round_trips == 100 && round_trip_failures == 0,
            "round trips " + std::to_string(round_trips - round_trip_failures) + "/100");
  o.require(witness_failures == 0,
            "witnesses " + std::to_string(witnesses - witness_failures) + "/" + std::to_string(witnesses));
  o.require(conservation_failures == 0, "route flows conserve " +
                                            std::to_string(conservation_checks - conservation_failures) + "/" +
                                            std::to_string(conservation_checks));
  o.require(perturbation_misses == 0, "perturbations flagged " +
                                          std::to_string(perturbations - perturbation_misses) + "/" +
                                          std::to_string(perturbations));
  return o;
}

Outcome controller_optimality() {
  Outcome o;
  std::mt19937_64 rng(77);
  int instances = 0, unicast = 0, multicast = 0, mismatches = 0, approx_over = 0;
  double worst_ratio = 1.0;
  int attempts = 0;
  while (instances < 50 && attempts < 10000) {
    ++attempts;
    auto inst = random_instance(rng, 8, 3, true);
    if (!inst) continue;
    const ServiceModel& model = *inst->model;
    const Commodity& c = model.commodities[0];
    std::vector<Route> routes;
    try {
      routes = enumerate_routes(model, 0);
    } catch (const EnumerationLimitError&) {
      continue;
    }
    if (routes.empty()) continue;
    const auto& lg = model.graphs[0];
    std::vector<Rational> link_q(model.net.link_count()), node_q(model.net.node_count());
    for (auto& q : link_q) q = frac(static_cast<long>(rng() % 10), 1 + static_cast<long>(rng() % 3));
    for (auto& q : node_q) q = frac(static_cast<long>(rng() % 10), 1 + static_cast<long>(rng() % 3));
    const auto costs = weighted_edge_costs<Rational>(lg, model.profiles[0], link_q, node_q);
    Rational best = route_cost<Rational>(routes[0], costs);
    for (const auto& r : routes) best = std::min(best, route_cost<Rational>(r, costs));

    Route chosen;
    if (c.destinations.size() == 1) {
      chosen = select_route_unicast<Rational>(lg, costs, c.source, c.destinations[0]);
      ++unicast;
    } else {
      chosen = select_route_multicast<Rational>(lg, costs, c.source, c.destinations);
      ++multicast;
    }
    const Rational exact = route_cost<Rational>(chosen, costs);
    if (exact != best || route_violation(lg, chosen, c.source, c.destinations).has_value()) ++mismatches;
    const Route approx = select_route_approx<Rational>(lg, costs, c.source, c.destinations);
    const Rational approx_cost = route_cost<Rational>(approx, costs);
    if (approx_cost > 2 * best || route_violation(lg, approx, c.source, c.destinations).has_value()) ++approx_over;
    if (sgn(best) > 0) worst_ratio = std::max(worst_ratio, to_double(approx_cost / best));
    ++instances;
  }
  o.require(instances == 50, std::to_string(instances) + " instances (" + std::to_string(unicast) + " unicast, " +
                                 std::to_string(multicast) + " multicast)");
  o.require(mismatches == 0, "exact selector mismatches " + std::to_string(mismatches));
  o.require(approx_over == 0, "approx within 2x (worst " + fmt("%.3f", worst_ratio) + ")");
  o.require(multicast >= 10, "multicast coverage");
  return o;
}

Outcome scheduling_properties() {
  Outcome o;
  RunOptions audited;
  audited.audit = true;
  std::uint64_t order = 0, inheritance = 0, work = 0, duplications = 0;
  bool hops_ok = true;
  for (const auto& [name, lambda] : std::vector<std::pair<std::string, double>>{{"abilene-2uc", 0.45},
                                                                                 {"abilene-mc", 0.9}}) {
    Scenario s = preset(name);
    const RunResult r = run(s, lambda, 1, audited);
    order += r.audit.order_violations;
    inheritance += r.audit.inheritance_violations;
    work += r.audit.work_conservation_violations;
    duplications += r.audit.duplications;
    const std::size_t bound = s.net.node_count() * (s.chains[0].length() + 1);
    hops_ok = hops_ok && r.audit.max_hops_seen <= bound;
  }
  o.require(order == 0, "priority order violations " + std::to_string(order));
  o.require(work == 0, "work conservation violations " + std::to_string(work));
  o.require(duplications > 0 && inheritance == 0,
            std::to_string(duplications) + " duplications, inheritance violations " + std::to_string(inheritance));
  o.require(hops_ok, "hop bound respected");

  Scenario fifo = preset("abilene-2uc");
  fifo.policy = Policy::kUcncFifo;
  const RunResult f = run(fifo, 0.45, 1, audited);
  fifo.policy = Policy::kUcncEnto;
  const RunResult e = run(fifo, 0.45, 1);
  o.require(f.growth_slope < kStableSlope, "fifo slope=" + fmt("%.2e", f.growth_slope));
  o.require(f.audit.order_violations == 0, "fifo order audited");
  const double fd = f.rows[0].mean_delay.value_or(1e300);
  const double ed = e.rows[0].mean_delay.value_or(1e300);
  o.require(fd < 10 * ed && ed < 10 * fd, "delay fifo " + fmt("%.2f", fd) + " vs ento " + fmt("%.2f", ed));
  return o;
}

Outcome undirected_extension() {
  Outcome o;
  std::vector<Node> nodes{{"a", 1}, {"b", 1}, {"c", 1}};
  const std::vector<Link> links_undirected{{0, 1, 1}, {1, 2, 1}};
  const std::vector<Link> links_directed{{0, 1, 1}, {1, 0, 1}, {1, 2, 1}, {2, 1, 1}};
  ServiceChain chain{"phi", {ServiceFunction{Rational(1, 4), 1, {1}, {}}}};
  std::vector<Commodity> commodities{{"ac", 0, {2}, 0, 1}, {"ca", 2, {0}, 0, 1}};

  Scenario s;
  s.name = "undirected-line";
  s.net = Network(nodes, links_undirected, Directionality::kUndirected);
  s.chains = {chain};
  s.commodities = commodities;
  Scenario d = s;
  d.net = Network(nodes, links_directed, Directionality::kDirected);

  const Rational theta_u = theta_of(s);
  const Rational theta_d = theta_of(d);
  o.require(theta_d == 1 && theta_u == Rational(1, 2),
            "theta* directed=" + to_string(theta_d) + " undirected=" + to_string(theta_u));
  const double inside = slope_at(s, Policy::kUcncEnto, 0.9 * to_double(theta_u));
  const double outside = slope_at(s, Policy::kUcncEnto, 1.1 * to_double(theta_u));
  o.require(inside < kStableSlope, "slope(0.9 theta*)=" + fmt("%.2e", inside));
  o.require(outside > kUnstableSlope, "slope(1.1 theta*)=" + fmt("%.3f", outside));
  return o;
}

Outcome determinism() {
  Outcome o;
  for (const char* name : {"abilene-2uc", "abilene-mc"}) {
    const Scenario s = preset(name);
    const std::string a = to_csv(run(s, 0.5, 3).rows);
    const std::string b = to_csv(run(s, 0.5, 3).rows);
    o.require(a == b, std::string(name) + " byte-identical");
  }
  Scenario s = preset("abilene-2uc");
  s.horizon = 5000;
  const std::vector<Policy> policies{Policy::kUcncEnto, Policy::kUcncFifo};
  const std::string a = to_csv(sweep(s, policies, {0.3, 0.6}, {1, 2}, 2));
  const std::string b = to_csv(sweep(s, policies, {0.3, 0.6}, {1, 2}, 4));
  o.require(a == b, "sweep byte-identical across thread counts");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"capacity boundary, two unicast commodities", capacity_boundary},
      {"flow shrinkage vs nearest-to-destination", flow_shrinkage},
      {"flow expansion vs nearest-to-source", flow_expansion},
      {"multicast gain", multicast_gain},
      {"mixed-cast statistical reproduction", mixed_cast},
      {"oracle soundness", oracle_soundness},
      {"controller optimality", controller_optimality},
      {"scheduling properties", scheduling_properties},
      {"undirected extension", undirected_extension},
      {"determinism", determinism},
  };
  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoul(argv[i]));
  int failures = 0;
  int ran = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (!selected.empty() && !selected.contains(k + 1)) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[k].second();
    } catch (const std::exception& e) {
      outcome.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %zu (%s): %s (%.1fs)\n", outcome.pass ? "PASS" : "FAIL", k + 1,
                criteria[k].first.c_str(), outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    failures += !outcome.pass;
  }
  std::printf("%d/%d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
