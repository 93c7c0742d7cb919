#include "ucnc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace ucnc {
namespace {

std::string json_text(const nlohmann::json& value, const char* what) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long>());
  throw ParseError(std::string(what) + " must be a string or an integer");
}

Rational json_rate(const nlohmann::json& value) {
  try {
    if (value.is_string()) return parse_rational(value.get<std::string>());
    if (value.is_number_integer()) return Rational(value.get<long>());
    if (value.is_number()) return rational_from_double(value.get<double>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("commodity rate: ") + e.what());
  }
  throw ParseError("commodity rate must be a number or a rational string");
}

std::string multicast_solver_name(MulticastSolver solver) {
  switch (solver) {
    case MulticastSolver::kExact:
      return "exact";
    case MulticastSolver::kApprox:
      return "approx";
    case MulticastSolver::kAuto:
      break;
  }
  return "auto";
}

MulticastSolver parse_multicast_solver(const std::string& text) {
  if (text == "exact") return MulticastSolver::kExact;
  if (text == "approx") return MulticastSolver::kApprox;
  if (text == "auto") return MulticastSolver::kAuto;
  throw ParseError("multicast_solver must be 'auto', 'exact' or 'approx'");
}

Commodity commodity_from_json(const nlohmann::json& entry, const Network& net, const std::vector<ServiceChain>& chains) {
  if (!entry.is_object()) throw ParseError("commodity entry must be an object");
  for (const char* key : {"id", "source", "chain", "rate"}) {
    if (!entry.contains(key)) throw ParseError(std::string("commodity entry needs '") + key + "'");
  }
  Commodity commodity;
  commodity.id = json_text(entry.at("id"), "commodity id");
  commodity.source = net.node_index(json_text(entry.at("source"), "source"));
  if (entry.contains("destinations")) {
    if (!entry.at("destinations").is_array()) throw ParseError("'destinations' must be an array");
    for (const auto& d : entry.at("destinations")) {
      commodity.destinations.push_back(net.node_index(json_text(d, "destination")));
    }
  } else if (entry.contains("destination")) {
    commodity.destinations.push_back(net.node_index(json_text(entry.at("destination"), "destination")));
  } else {
    throw ParseError("commodity entry needs 'destinations'");
  }
  const std::string chain_id = json_text(entry.at("chain"), "chain");
  auto it = std::find_if(chains.begin(), chains.end(), [&](const ServiceChain& c) { return c.id == chain_id; });
  if (it == chains.end()) throw ValidationError("commodity '" + commodity.id + "' references unknown chain '" + chain_id + "'");
  commodity.chain = static_cast<std::size_t>(it - chains.begin());
  commodity.rate = json_rate(entry.at("rate"));
  if (entry.contains("arrivals")) {
    const std::string kind = json_text(entry.at("arrivals"), "arrivals");
    if (kind == "poisson") {
      commodity.arrivals = ArrivalDistribution::kPoisson;
    } else if (kind == "bernoulli") {
      commodity.arrivals = ArrivalDistribution::kBernoulli;
    } else {
      throw ParseError("arrivals must be 'poisson' or 'bernoulli'");
    }
  }
  if (entry.contains("anycast")) {
    if (!entry.at("anycast").is_boolean()) throw ParseError("'anycast' must be a boolean");
    commodity.anycast = entry.at("anycast").get<bool>();
  }
  return commodity;
}

ServiceFunction unit_function(Rational r, Rational xi, std::vector<NodeIndex> hosts) {
  ServiceFunction fn;
  fn.compute_per_unit = std::move(r);
  fn.scale = std::move(xi);
  fn.hosts = std::move(hosts);
  return fn;
}

// Abilene node "k" has index k - 1.
NodeIndex abilene_node(int k) { return static_cast<NodeIndex>(k - 1); }

Commodity make_commodity(std::string id, int source, std::vector<int> destinations, std::size_t chain) {
  Commodity c;
  c.id = std::move(id);
  c.source = abilene_node(source);
  for (int d : destinations) c.destinations.push_back(abilene_node(d));
  c.chain = chain;
  c.rate = 1;
  return c;
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.9g", value);
  return buffer;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::string policy_name(Policy policy) {
  switch (policy) {
    case Policy::kUcncEnto:
      return "ucnc-ento";
    case Policy::kUcncFifo:
      return "ucnc-fifo";
    case Policy::kNearestToSource:
      return "nearest-to-source";
    case Policy::kNearestToDestination:
      return "nearest-to-destination";
    case Policy::kMulticastAsUnicast:
      return "multicast-as-unicast";
  }
  return "unknown";
}

const std::vector<Policy>& all_policies() {
  static const std::vector<Policy> policies = {Policy::kUcncEnto, Policy::kUcncFifo, Policy::kNearestToSource,
                                               Policy::kNearestToDestination, Policy::kMulticastAsUnicast};
  return policies;
}

Policy parse_policy(const std::string& name) {
  for (Policy p : all_policies()) {
    if (policy_name(p) == name) return p;
  }
  throw std::invalid_argument("unknown policy '" + name + "'");
}

void validate_scenario(const Scenario& scenario) {
  if (scenario.seeds.empty()) throw ValidationError("scenario needs at least one seed");
  if (scenario.lambda_grid.empty()) throw ValidationError("scenario needs a nonempty lambda grid");
  if (!std::is_sorted(scenario.lambda_grid.begin(), scenario.lambda_grid.end())) {
    throw ValidationError("lambda grid must be sorted ascending");
  }
  for (double lambda : scenario.lambda_grid) {
    if (!(lambda >= 0)) throw ValidationError("lambda multipliers must be nonnegative");
  }
  for (const auto& chain : scenario.chains) validate_chain(chain, scenario.net);
  for (const auto& commodity : scenario.commodities) {
    validate_commodity(commodity, scenario.net, scenario.chains.size());
  }
}

Scenario scenario_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("config document must be a JSON object");
  Scenario scenario;
  if (doc.contains("topology_preset")) {
    if (json_text(doc.at("topology_preset"), "topology_preset") != "abilene") {
      throw ParseError("topology_preset must be 'abilene'");
    }
    scenario.net = abilene_preset();
  } else {
    scenario.net = network_from_json(doc);
  }
  if (doc.contains("chains")) {
    if (!doc.at("chains").is_array()) throw ParseError("'chains' must be an array");
    for (const auto& entry : doc.at("chains")) scenario.chains.push_back(chain_from_json(entry, scenario.net));
  }
  std::set<std::string> chain_ids;
  for (const auto& chain : scenario.chains) {
    if (!chain_ids.insert(chain.id).second) throw ValidationError("duplicate chain id '" + chain.id + "'");
  }
  if (doc.contains("commodities")) {
    if (!doc.at("commodities").is_array()) throw ParseError("'commodities' must be an array");
    for (const auto& entry : doc.at("commodities")) {
      scenario.commodities.push_back(commodity_from_json(entry, scenario.net, scenario.chains));
    }
  }
  if (doc.contains("scenario")) {
    const auto& s = doc.at("scenario");
    if (!s.is_object()) throw ParseError("'scenario' must be an object");
    if (s.contains("name")) scenario.name = json_text(s.at("name"), "name");
    try {
      if (s.contains("policy")) scenario.policy = parse_policy(json_text(s.at("policy"), "policy"));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
    if (s.contains("horizon")) {
      if (!s.at("horizon").is_number_unsigned()) throw ParseError("horizon must be a nonnegative integer");
      scenario.horizon = s.at("horizon").get<std::uint64_t>();
    }
    if (s.contains("seeds")) {
      if (!s.at("seeds").is_array()) throw ParseError("'seeds' must be an array");
      scenario.seeds.clear();
      for (const auto& v : s.at("seeds")) {
        if (!v.is_number_unsigned()) throw ParseError("seeds must be nonnegative integers");
        scenario.seeds.push_back(v.get<std::uint64_t>());
      }
    }
    if (s.contains("lambda_grid")) {
      if (!s.at("lambda_grid").is_array()) throw ParseError("'lambda_grid' must be an array");
      scenario.lambda_grid.clear();
      for (const auto& v : s.at("lambda_grid")) {
        if (!v.is_number()) throw ParseError("lambda_grid entries must be numbers");
        scenario.lambda_grid.push_back(v.get<double>());
      }
    }
    if (s.contains("multicast_solver")) {
      scenario.multicast = parse_multicast_solver(json_text(s.at("multicast_solver"), "multicast_solver"));
    }
  }
  validate_scenario(scenario);
  return scenario;
}

Scenario load_scenario(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed config: ") + e.what());
  }
  return scenario_from_json(doc);
}

nlohmann::json scenario_to_json(const Scenario& scenario) {
  nlohmann::json doc = network_to_json(scenario.net);
  doc["chains"] = nlohmann::json::array();
  for (const auto& chain : scenario.chains) doc["chains"].push_back(chain_to_json(chain, scenario.net));
  doc["commodities"] = nlohmann::json::array();
  for (const auto& c : scenario.commodities) {
    nlohmann::json entry;
    entry["id"] = c.id;
    entry["source"] = scenario.net.node(c.source).name;
    entry["destinations"] = nlohmann::json::array();
    for (NodeIndex d : c.destinations) entry["destinations"].push_back(scenario.net.node(d).name);
    entry["chain"] = scenario.chains.at(c.chain).id;
    entry["rate"] = to_string(c.rate);
    entry["arrivals"] = c.arrivals == ArrivalDistribution::kPoisson ? "poisson" : "bernoulli";
    if (c.anycast) entry["anycast"] = true;
    doc["commodities"].push_back(std::move(entry));
  }
  doc["scenario"] = {{"name", scenario.name},
                     {"policy", policy_name(scenario.policy)},
                     {"horizon", scenario.horizon},
                     {"seeds", scenario.seeds},
                     {"lambda_grid", scenario.lambda_grid},
                     {"multicast_solver", multicast_solver_name(scenario.multicast)}};
  return doc;
}

std::vector<std::string> preset_names() {
  return {"abilene-2uc", "abilene-shrink", "abilene-expand", "abilene-mc", "mixed-18"};
}

Scenario preset(const std::string& name, std::uint64_t seed) {
  Scenario scenario;
  scenario.name = name;
  scenario.net = abilene_preset();
  const std::vector<NodeIndex> hosts = {abilene_node(3), abilene_node(8)};
  if (name == "abilene-2uc") {
    scenario.chains.push_back({"phi", {unit_function(1, 1, hosts), unit_function(1, 1, hosts)}});
    scenario.commodities.push_back(make_commodity("c1", 1, {11}, 0));
    scenario.commodities.push_back(make_commodity("c2", 4, {7}, 0));
    scenario.lambda_grid = {0.1, 0.2, 0.3, 0.4, 0.45, 0.5, 0.55};
  } else if (name == "abilene-shrink") {
    scenario.chains.push_back({"phi", {unit_function(Rational(1, 3), Rational(1, 3), hosts)}});
    scenario.commodities.push_back(make_commodity("c1", 2, {7}, 0));
    scenario.lambda_grid = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  } else if (name == "abilene-expand") {
    scenario.chains.push_back({"phi", {unit_function(1, 3, hosts)}});
    scenario.commodities.push_back(make_commodity("c1", 2, {7}, 0));
    scenario.lambda_grid = {0.2, 0.4, 0.6, 0.8, 1.0};
  } else if (name == "abilene-mc") {
    scenario.chains.push_back({"phi", {unit_function(1, 1, hosts), unit_function(1, 1, hosts)}});
    scenario.commodities.push_back(make_commodity("c1", 1, {7, 11}, 0));
    scenario.lambda_grid = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  } else if (name == "mixed-18") {
    return mixed_cast_preset(seed);
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  for (auto& commodity : scenario.commodities) commodity.rate = 1;
  validate_scenario(scenario);
  return scenario;
}

Scenario mixed_cast_preset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform_index = [&rng](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto hundredths = [&]() {
    Rational value(static_cast<long>(50 + uniform_index(151)), 100);
    value.canonicalize();
    return value;
  };

  const Network base = abilene_preset();
  const std::size_t n = base.node_count();
  const std::vector<std::size_t> chain_lengths = {2, 2, 3};

  std::vector<ServiceChain> chains;
  std::set<NodeIndex> compute_nodes;
  for (std::size_t k = 0; k < chain_lengths.size(); ++k) {
    ServiceChain chain;
    chain.id = "phi" + std::to_string(k + 1);
    for (std::size_t i = 0; i < chain_lengths[k]; ++i) {
      ServiceFunction fn;
      fn.scale = hundredths();
      fn.compute_per_unit = hundredths();
      std::vector<NodeIndex> all(n);
      for (NodeIndex u = 0; u < n; ++u) all[u] = u;
      std::vector<NodeIndex> picked;
      std::sample(all.begin(), all.end(), std::back_inserter(picked), 4, rng);
      fn.hosts = picked;
      compute_nodes.insert(picked.begin(), picked.end());
      chain.functions.push_back(std::move(fn));
    }
    chains.push_back(std::move(chain));
  }

  std::vector<Node> nodes = base.nodes();
  for (NodeIndex u = 0; u < n; ++u) nodes[u].compute_capacity = compute_nodes.contains(u) ? 1 : 0;
  Network net(nodes, base.links(), base.directionality());

  std::vector<Commodity> commodities;
  for (std::size_t k = 0; k < chains.size(); ++k) {
    for (std::size_t j = 0; j < 6; ++j) {
      const bool multicast = j >= 4;
      Commodity c;
      c.id = chains[k].id + (multicast ? "-mc" + std::to_string(j - 3) : "-uc" + std::to_string(j + 1));
      c.chain = k;
      c.rate = 1;
      c.source = uniform_index(n);
      const auto dist = net.hop_distances(c.source);
      std::vector<NodeIndex> far;
      for (NodeIndex u = 0; u < n; ++u) {
        if (dist[u] && *dist[u] >= 2) far.push_back(u);
      }
      std::sample(far.begin(), far.end(), std::back_inserter(c.destinations), multicast ? 2 : 1, rng);
      if (multicast) std::shuffle(c.destinations.begin(), c.destinations.end(), rng);
      commodities.push_back(std::move(c));
    }
  }

  Scenario scenario;
  scenario.name = "mixed-18";
  scenario.net = std::move(net);
  scenario.chains = std::move(chains);
  scenario.commodities = std::move(commodities);
  scenario.lambda_grid = {0.02, 0.04, 0.06, 0.08, 0.1, 0.12};
  validate_scenario(scenario);
  return scenario;
}

std::vector<Commodity> multicast_as_unicast(const Commodity& commodity) {
  if (commodity.destinations.size() < 2) {
    throw std::invalid_argument("multicast_as_unicast needs a multicast commodity");
  }
  std::vector<Commodity> out;
  for (std::size_t k = 0; k < commodity.destinations.size(); ++k) {
    Commodity c = commodity;
    c.id = commodity.id + "-" + std::to_string(k + 1);
    c.destinations = {commodity.destinations[k]};
    c.anycast = false;
    out.push_back(std::move(c));
  }
  return out;
}

Scenario split_multicast(const Scenario& scenario) {
  Scenario out = scenario;
  out.commodities.clear();
  for (const auto& c : scenario.commodities) {
    if (c.kind() == CastKind::kMulticast) {
      for (auto& part : multicast_as_unicast(c)) {
        part.id = c.id + "->" + scenario.net.node(part.destinations.front()).name;
        out.commodities.push_back(std::move(part));
      }
    } else {
      out.commodities.push_back(c);
    }
  }
  return out;
}

NodeIndex nearest_compute_node(const ServiceModel& model, std::size_t commodity, bool toward_destination) {
  const Commodity& c = model.commodities.at(commodity);
  const ServiceChain& chain = model.chains.at(c.chain);
  std::vector<std::vector<std::optional<std::size_t>>> to_destination;
  for (NodeIndex d : c.destinations) to_destination.push_back(model.net.hop_distances_to(d));
  const auto from_source = model.net.hop_distances(c.source);

  std::optional<NodeIndex> best;
  std::size_t best_distance = 0;
  for (NodeIndex u = 0; u < model.net.node_count(); ++u) {
    if (sgn(model.net.node(u).compute_capacity) <= 0) continue;
    const bool hosts_all = std::all_of(chain.functions.begin(), chain.functions.end(), [u](const ServiceFunction& f) {
      return std::find(f.hosts.begin(), f.hosts.end(), u) != f.hosts.end();
    });
    if (!hosts_all || !from_source[u]) continue;
    std::size_t distance = 0;
    bool reachable = true;
    for (const auto& dist : to_destination) {
      if (!dist[u]) reachable = false;
      distance += dist[u].value_or(0);
    }
    if (!reachable) continue;
    if (!toward_destination) distance = *from_source[u];
    if (!best || distance < best_distance) {
      best = u;
      best_distance = distance;
    }
  }
  if (!best) throw ValidationError("no compute node hosts every function of chain '" + chain.id + "'");
  return *best;
}

Route nearest_route(const ServiceModel& model, std::size_t commodity, bool toward_destination) {
  const Commodity& c = model.commodities.at(commodity);
  const LayeredGraph& lg = model.graph_of(commodity);
  const NodeIndex chosen = nearest_compute_node(model, commodity, toward_destination);
  // Unit hop costs; computation anywhere but the chosen node is priced out.
  const double excluded = 1e9;
  std::vector<double> costs(lg.edge_count(), 1.0);
  for (EdgeId e = 0; e < lg.edge_count(); ++e) {
    const auto& edge = lg.edge(e);
    if (edge.kind == EdgeKind::kComputation) costs[e] = edge.tail == chosen ? 0.0 : excluded;
  }
  if (c.kind() == CastKind::kMulticast) {
    return select_route_multicast<double>(lg, costs, c.source, c.destinations, commodity);
  }
  if (c.kind() == CastKind::kAnycast) return select_route_anycast<double>(lg, costs, c.source, c.destinations, commodity);
  return select_route_unicast<double>(lg, costs, c.source, c.destinations.front(), commodity);
}

RunResult run(const Scenario& input, double lambda_multiplier, std::uint64_t seed, const RunOptions& options) {
  const Policy policy = input.policy;
  const Scenario scenario = policy == Policy::kMulticastAsUnicast ? split_multicast(input) : input;
  auto model = make_service_model(scenario.net, scenario.chains, scenario.commodities);
  const std::size_t commodities = model->commodities.size();

  ControllerOptions controller_options;
  controller_options.multicast = scenario.multicast;
  controller_options.check_approximation = options.check_approximation;
  Controller controller(model, controller_options);

  DataplaneOptions dataplane_options;
  dataplane_options.discipline = policy == Policy::kUcncFifo ? Discipline::kFifo : Discipline::kEnto;
  dataplane_options.audit = options.audit;
  Dataplane dataplane(model, dataplane_options);

  std::vector<std::optional<Route>> fixed(commodities);
  if (policy == Policy::kNearestToSource || policy == Policy::kNearestToDestination) {
    for (std::size_t c = 0; c < commodities; ++c) {
      fixed[c] = nearest_route(*model, c, policy == Policy::kNearestToDestination);
    }
  }

  std::vector<ArrivalProcess> arrivals;
  std::vector<double> rates;
  for (std::size_t c = 0; c < commodities; ++c) {
    arrivals.emplace_back(seed, c);
    rates.push_back(to_double(model->commodities[c].rate) * lambda_multiplier);
  }

  RunResult result;
  result.backlog_trace.reserve(scenario.horizon);
  if (options.trace_queues) result.queue_traces.assign(dataplane.queue_count(), {});
  for (std::uint64_t t = 0; t < scenario.horizon; ++t) {
    for (std::size_t c = 0; c < commodities; ++c) {
      const std::uint64_t count = arrivals[c].sample(model->commodities[c].arrivals, rates[c]);
      if (count == 0) continue;
      const Route route = fixed[c] ? *fixed[c] : controller.select(c);
      dataplane.admit(count, route, t);
      controller.record(route, count);
    }
    dataplane.step(t);
    controller.end_slot();

    double total = 0.0;
    for (std::size_t q = 0; q < dataplane.queue_count(); ++q) {
      const double backlog = dataplane.queue_backlog(q);
      total += backlog;
      result.max_backlog = std::max(result.max_backlog, backlog);
      if (options.trace_queues) result.queue_traces[q].push_back(backlog);
    }
    result.backlog_trace.push_back(total);
  }

  result.growth_slope = growth_slope(result.backlog_trace);
  result.audit = dataplane.audit();
  result.approximation = controller.approximation_stats();
  result.final_virtual_queues = controller.state();
  result.log = dataplane.log();
  const double vq_sum = controller.state().total();
  for (std::size_t c = 0; c < commodities; ++c) {
    const CommodityMetrics metrics = commodity_metrics(result.log, c, scenario.horizon);
    CsvRow row;
    row.policy = policy_name(policy);
    row.lambda_multiplier = lambda_multiplier;
    row.seed = seed;
    row.commodity_id = model->commodities[c].id;
    row.throughput = metrics.throughput;
    row.mean_delay = metrics.mean_delay;
    row.delivered = metrics.delivered;
    row.vq_sum_final = vq_sum;
    row.max_backlog = result.max_backlog;
    row.growth_slope = result.growth_slope;
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::vector<CsvRow> sweep(const Scenario& scenario, const std::vector<Policy>& policies,
                          const std::vector<double>& lambda_grid, const std::vector<std::uint64_t>& seeds,
                          unsigned threads) {
  if (seeds.empty()) throw ValidationError("sweep needs at least one seed");
  if (lambda_grid.empty()) throw ValidationError("sweep needs a nonempty lambda grid");
  if (policies.empty()) throw ValidationError("sweep needs at least one policy");
  if (!std::is_sorted(lambda_grid.begin(), lambda_grid.end())) {
    throw ValidationError("lambda grid must be sorted ascending");
  }
  struct Task {
    Policy policy;
    double lambda;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (Policy p : policies) {
    for (double lambda : lambda_grid) {
      for (std::uint64_t seed : seeds) tasks.push_back({p, lambda, seed});
    }
  }
  std::vector<std::vector<CsvRow>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      try {
        Scenario local = scenario;
        local.policy = tasks[k].policy;
        results[k] = run(local, tasks[k].lambda, tasks[k].seed).rows;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(tasks.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::size_t> order(tasks.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::make_tuple(policy_name(tasks[a].policy), tasks[a].lambda, tasks[a].seed) <
           std::make_tuple(policy_name(tasks[b].policy), tasks[b].lambda, tasks[b].seed);
  });
  std::vector<CsvRow> rows;
  for (std::size_t k : order) rows.insert(rows.end(), results[k].begin(), results[k].end());
  return rows;
}

std::string csv_header() {
  return "policy,lambda_multiplier,seed,commodity_id,throughput,mean_delay,delivered,vq_sum_final,max_backlog,"
         "growth_slope";
}

std::string to_csv(const std::vector<CsvRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& row : rows) {
    out += row.policy + "," + format_double(row.lambda_multiplier) + "," + std::to_string(row.seed) + "," +
           row.commodity_id + "," + format_double(row.throughput) + "," +
           (row.mean_delay ? format_double(*row.mean_delay) : std::string{}) + "," + std::to_string(row.delivered) +
           "," + format_double(row.vq_sum_final) + "," + format_double(row.max_backlog) + "," +
           format_double(row.growth_slope) + "\n";
  }
  return out;
}

std::vector<CsvRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) throw ParseError("CSV header does not match");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 10) throw ParseError("CSV row needs 10 fields: " + line);
    try {
      CsvRow row;
      row.policy = f[0];
      row.lambda_multiplier = std::stod(f[1]);
      row.seed = std::stoull(f[2]);
      row.commodity_id = f[3];
      row.throughput = std::stod(f[4]);
      if (!f[5].empty()) row.mean_delay = std::stod(f[5]);
      row.delivered = std::stoull(f[6]);
      row.vq_sum_final = std::stod(f[7]);
      row.max_backlog = std::stod(f[8]);
      row.growth_slope = std::stod(f[9]);
      rows.push_back(std::move(row));
    } catch (const std::logic_error&) {
      throw ParseError("malformed CSV row: " + line);
    }
  }
  return rows;
}

std::string gnuplot_columns(const std::vector<CsvRow>& rows) {
  struct Accumulator {
    double throughput = 0.0;
    std::size_t throughput_count = 0;
    double delay = 0.0;
    std::size_t delay_count = 0;
  };
  std::map<std::string, std::map<double, Accumulator>> table;
  for (const auto& row : rows) {
    auto& acc = table[row.policy][row.lambda_multiplier];
    acc.throughput += row.throughput;
    ++acc.throughput_count;
    if (row.mean_delay) {
      acc.delay += *row.mean_delay;
      ++acc.delay_count;
    }
  }
  std::string out;
  for (const auto& [policy, points] : table) {
    out += "# " + policy + "\n# lambda throughput mean_delay\n";
    for (const auto& [lambda, acc] : points) {
      out += format_double(lambda) + " " + format_double(acc.throughput / static_cast<double>(acc.throughput_count)) +
             " " + (acc.delay_count ? format_double(acc.delay / static_cast<double>(acc.delay_count)) : "NaN") + "\n";
    }
    out += "\n\n";
  }
  return out;
}

}  // namespace ucnc
