#include "ucnc/oracle.hpp"

#include <algorithm>
#include <map>

#include "ucnc/lp.hpp"
#include "ucnc/routing.hpp"

namespace ucnc {
namespace {

class RouteEnumerator {
 public:
  RouteEnumerator(const LayeredGraph& lg, std::size_t commodity, std::size_t limit, const std::vector<bool>* allowed)
      : lg_(lg), commodity_(commodity), limit_(limit), allowed_(allowed), in_tree_(lg.node_count(), false) {}

  std::vector<Route> paths(LayeredNodeId root, const std::vector<LayeredNodeId>& targets) {
    targets_ = targets;
    if (is_target(root)) {
      emit({}, root);
      return std::move(routes_);
    }
    in_tree_[root] = true;
    std::vector<EdgeId> path;
    path_dfs(root, path, [&](const std::vector<EdgeId>& found) { emit(found, root); });
    return std::move(routes_);
  }

  std::vector<Route> arborescences(LayeredNodeId root, const std::vector<LayeredNodeId>& terminals) {
    terminals_ = terminals;
    root_ = root;
    in_tree_[root] = true;
    tree_nodes_ = {root};
    grow(0);
    return std::move(routes_);
  }

 private:
  bool usable(EdgeId e) const { return allowed_ == nullptr || (*allowed_)[e]; }
  bool is_target(LayeredNodeId v) const { return std::find(targets_.begin(), targets_.end(), v) != targets_.end(); }

  void emit(const std::vector<EdgeId>& edges, LayeredNodeId root) {
    if (routes_.size() >= limit_) throw EnumerationLimitError("route enumeration exceeded its bound");
    Route route = make_route(lg_, commodity_, root, edges);
    if (terminals_.size() > 1) route.kind = RouteKind::kArborescence;
    routes_.push_back(std::move(route));
  }

  // Simple paths from the current path end through nodes outside the tree,
  // stopping at the first target reached.
  template <typename Visit>
  void path_dfs(LayeredNodeId v, std::vector<EdgeId>& path, const Visit& visit) {
    for (EdgeId e : lg_.out_edges(v)) {
      if (!usable(e)) continue;
      const LayeredNodeId next = lg_.edge(e).to;
      if (in_tree_[next]) continue;
      path.push_back(e);
      if (is_target(next)) {
        visit(path);
      } else {
        in_tree_[next] = true;
        path_dfs(next, path, visit);
        in_tree_[next] = false;
      }
      path.pop_back();
    }
  }

  void grow(std::size_t k) {
    while (k < terminals_.size() && in_tree_[terminals_[k]]) ++k;
    if (k == terminals_.size()) {
      std::vector<EdgeId> sorted = tree_edges_;
      std::sort(sorted.begin(), sorted.end());
      if (seen_.insert(sorted).second) emit(sorted, root_);
      return;
    }
    targets_ = {terminals_[k]};
    const std::vector<LayeredNodeId> anchors = tree_nodes_;
    for (LayeredNodeId anchor : anchors) {
      std::vector<EdgeId> path;
      path_dfs(anchor, path, [&](const std::vector<EdgeId>& found) {
        const std::size_t edge_mark = tree_edges_.size();
        const std::size_t node_mark = tree_nodes_.size();
        for (EdgeId e : found) {
          tree_edges_.push_back(e);
          tree_nodes_.push_back(lg_.edge(e).to);
        }
        // Interior path nodes are already marked by the search; only the
        // reached terminal is new.
        const LayeredNodeId reached = tree_nodes_.back();
        in_tree_[reached] = true;
        const auto saved_targets = targets_;
        grow(k + 1);
        targets_ = saved_targets;
        in_tree_[reached] = false;
        tree_edges_.resize(edge_mark);
        tree_nodes_.resize(node_mark);
      });
    }
  }

  const LayeredGraph& lg_;
  std::size_t commodity_;
  std::size_t limit_;
  const std::vector<bool>* allowed_;
  std::vector<bool> in_tree_;
  std::vector<LayeredNodeId> targets_;
  std::vector<LayeredNodeId> terminals_;
  LayeredNodeId root_ = 0;
  std::vector<LayeredNodeId> tree_nodes_;
  std::vector<EdgeId> tree_edges_;
  std::set<std::vector<EdgeId>> seen_;
  std::vector<Route> routes_;
};

std::vector<Route> enumerate_in(const LayeredGraph& lg, NodeIndex source, std::span<const NodeIndex> destinations,
                                bool multicast, std::size_t index, std::size_t limit,
                                const std::vector<bool>* allowed) {
  const LayeredNodeId root = lg.node(source, 0);
  auto terminals = detail::terminal_nodes(lg, destinations);
  RouteEnumerator enumerator(lg, index, limit, allowed);
  if (!multicast) return enumerator.paths(root, terminals);
  std::erase(terminals, root);
  return enumerator.arborescences(root, terminals);
}

bool is_multicast(const Commodity& commodity) { return commodity.kind() == CastKind::kMulticast; }

Rational unit_load(const LayeredGraph& lg, const ScalingProfile& profile, EdgeId e) {
  const auto& edge = lg.edge(e);
  return edge.kind == EdgeKind::kTransmission ? profile.w(edge.layer) : profile.x_at(edge.layer, edge.tail);
}

mpz_class lcm(const mpz_class& a, const mpz_class& b) {
  mpz_class out;
  mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

// Route rate variables of every commodity with a positive direction entry,
// plus theta; maximizes theta subject to
//   sum_k lambda_k - theta * d_c = 0              per commodity
//   sum_k load_e(k) lambda_k + slack_e = mu_e     per link and node
class RegionLp {
 public:
  RegionLp(const ServiceModel& model, const RateVector& direction) : model_(model), direction_(direction) {
    for (std::size_t c = 0; c < direction.size(); ++c) {
      if (sgn(direction[c]) > 0) {
        commodity_row_[c] = rhs_.size();
        rhs_.push_back(0);
      }
    }
    link_row_ = rhs_.size();
    for (const auto& link : model.net.links()) rhs_.push_back(link.capacity);
    node_row_ = rhs_.size();
    for (const auto& node : model.net.nodes()) rhs_.push_back(node.compute_capacity);
  }

  const std::map<std::size_t, std::size_t>& active() const { return commodity_row_; }
  std::size_t link_row() const { return link_row_; }
  std::size_t node_row() const { return node_row_; }
  const std::vector<Rational>& rhs() const { return rhs_; }

  LpColumn theta_column() const {
    LpColumn column;
    for (const auto& [c, row] : commodity_row_) column.entries.emplace_back(row, -direction_[c]);
    column.objective = 1;
    return column;
  }

  LpColumn route_column(std::size_t c, const Route& route) const {
    LpColumn column;
    column.entries.emplace_back(commodity_row_.at(c), Rational(1));
    const RouteLoad load = route_load(model_.graph_of(c), model_.profile_of(c), route);
    for (const auto& [link, amount] : load.link) column.entries.emplace_back(link_row_ + link, amount);
    for (const auto& [node, amount] : load.node) column.entries.emplace_back(node_row_ + node, amount);
    return column;
  }

 private:
  const ServiceModel& model_;
  const RateVector& direction_;
  std::map<std::size_t, std::size_t> commodity_row_;
  std::size_t link_row_ = 0;
  std::size_t node_row_ = 0;
  std::vector<Rational> rhs_;
};

Route cheapest_route(const ServiceModel& model, std::size_t c, std::span<const Rational> costs) {
  const Commodity& commodity = model.commodities[c];
  const LayeredGraph& lg = model.graph_of(c);
  switch (commodity.kind()) {
    case CastKind::kUnicast:
      return select_route_unicast<Rational>(lg, costs, commodity.source, commodity.destinations.front(), c);
    case CastKind::kAnycast:
      return select_route_anycast<Rational>(lg, costs, commodity.source, commodity.destinations, c);
    case CastKind::kMulticast:
      break;
  }
  return select_route_multicast<Rational>(lg, costs, commodity.source, commodity.destinations, c);
}

bool has_empty_route(const ServiceModel& model, std::size_t c) {
  const Commodity& commodity = model.commodities[c];
  const LayeredGraph& lg = model.graph_of(c);
  if (lg.chain_length() != 0) return false;
  const auto& d = commodity.destinations;
  const bool source_is_destination = std::find(d.begin(), d.end(), commodity.source) != d.end();
  if (!source_is_destination) return false;
  return commodity.kind() != CastKind::kMulticast || d.size() == 1;
}

}  // namespace

std::vector<Route> enumerate_routes(const LayeredGraph& lg, const Commodity& commodity, std::size_t index,
                                    const EnumerationBounds& bounds) {
  if (lg.physical_node_count() > bounds.max_physical_nodes) {
    throw EnumerationLimitError("network exceeds the enumeration node bound");
  }
  if (commodity.destinations.size() > bounds.max_terminals) {
    throw EnumerationLimitError("commodity exceeds the enumeration terminal bound");
  }
  return enumerate_in(lg, commodity.source, commodity.destinations, is_multicast(commodity), index,
                      bounds.max_routes, nullptr);
}

std::vector<Route> enumerate_routes(const ServiceModel& model, std::size_t index, const EnumerationBounds& bounds) {
  return enumerate_routes(model.graph_of(index), model.commodities.at(index), index, bounds);
}

ScalarRate max_scalar_rate(const ServiceModel& model, const RateVector& direction, const OracleOptions& options) {
  if (direction.size() != model.commodities.size()) {
    throw std::invalid_argument("rate vector size differs from the commodity count");
  }
  for (const auto& d : direction) {
    if (sgn(d) < 0) throw std::invalid_argument("rates must be nonnegative");
  }
  RegionLp region(model, direction);
  if (region.active().empty()) throw std::invalid_argument("direction must be nonzero");

  ScalarRate result;
  result.assignment.commodities.resize(model.commodities.size());

  bool all_free = true;
  for (const auto& [c, row] : region.active()) all_free = all_free && has_empty_route(model, c);
  if (all_free) {
    result.unbounded = true;
    for (const auto& [c, row] : region.active()) {
      result.assignment.commodities[c].push_back({Route{c, RouteKind::kPath, {}}, direction[c]});
    }
    return result;
  }

  std::vector<std::pair<std::size_t, Route>> initial;
  bool use_generation = options.routes == RouteSource::kColumnGeneration;
  if (!use_generation) {
    try {
      EnumerationBounds bounds = options.bounds;
      std::size_t budget = options.routes == RouteSource::kAuto
                               ? std::min(bounds.max_routes, options.auto_enumeration_limit)
                               : bounds.max_routes;
      for (const auto& [c, row] : region.active()) {
        bounds.max_routes = budget;
        auto routes = enumerate_routes(model, c, bounds);
        budget -= std::min(budget, routes.size());
        for (auto& route : routes) initial.emplace_back(c, std::move(route));
      }
    } catch (const EnumerationLimitError&) {
      if (options.routes == RouteSource::kEnumerate) throw;
      use_generation = true;
    }
  }
  if (use_generation) {
    initial.clear();
    for (const auto& [c, row] : region.active()) {
      const LayeredGraph& lg = model.graph_of(c);
      const std::vector<Rational> zero(lg.edge_count(), Rational(0));
      try {
        initial.emplace_back(c, cheapest_route(model, c, zero));
      } catch (const RoutingError&) {
      }
    }
  }

  for (const auto& [c, row] : region.active()) {
    const bool routable =
        std::any_of(initial.begin(), initial.end(), [&, c = c](const auto& entry) { return entry.first == c; });
    if (!routable) return result;  // theta = 0
  }

  ExactLp lp(region.rhs());
  const std::size_t theta = lp.add_column(region.theta_column());
  for (std::size_t r = region.link_row(); r < region.rhs().size(); ++r) lp.add_column(LpColumn{{{r, Rational(1)}}, 0});
  std::vector<std::pair<std::size_t, Route>> column_route;  // by column index offset
  const std::size_t first_route = lp.column_count();
  for (auto& entry : initial) {
    lp.add_column(region.route_column(entry.first, entry.second));
    column_route.push_back(std::move(entry));
  }

  ColumnPricer pricer;
  if (use_generation) {
    pricer = [&](std::span<const Rational> duals) -> std::optional<LpColumn> {
      std::vector<Rational> link_price(model.net.link_count());
      std::vector<Rational> node_price(model.net.node_count());
      for (LinkIndex e = 0; e < link_price.size(); ++e) link_price[e] = duals[region.link_row() + e];
      for (NodeIndex u = 0; u < node_price.size(); ++u) node_price[u] = duals[region.node_row() + u];
      for (const auto& price : link_price) {
        if (sgn(price) < 0) throw std::logic_error("negative link price during column generation");
      }
      for (const auto& price : node_price) {
        if (sgn(price) < 0) throw std::logic_error("negative node price during column generation");
      }
      for (const auto& [c, row] : region.active()) {
        const LayeredGraph& lg = model.graph_of(c);
        const auto costs = weighted_edge_costs<Rational>(lg, model.profile_of(c), link_price, node_price);
        Route route = cheapest_route(model, c, costs);
        if (duals[row] + route_cost<Rational>(route, costs) < 0) {
          LpColumn column = region.route_column(c, route);
          column_route.emplace_back(c, std::move(route));
          return column;
        }
      }
      return std::nullopt;
    };
  }

  const LpSolution solution = lp.solve(pricer);
  result.column_generation = use_generation;
  result.route_columns = column_route.size();
  if (solution.status == LpStatus::kInfeasible) throw std::logic_error("capacity LP unexpectedly infeasible");
  if (solution.status == LpStatus::kUnbounded) {
    // Only zero-load routes can grow without bound; handled above.
    throw std::logic_error("capacity LP unexpectedly unbounded");
  }
  result.theta = solution.values[theta];
  for (std::size_t k = 0; k < column_route.size(); ++k) {
    const Rational& value = solution.values[first_route + k];
    if (sgn(value) > 0) {
      result.assignment.commodities[column_route[k].first].push_back({column_route[k].second, value});
    }
  }
  return result;
}

Feasibility capacity_feasible(const ServiceModel& model, const RateVector& rates, const OracleOptions& options) {
  Feasibility out;
  if (std::all_of(rates.begin(), rates.end(), [](const Rational& r) { return sgn(r) == 0; })) {
    if (rates.size() != model.commodities.size()) {
      throw std::invalid_argument("rate vector size differs from the commodity count");
    }
    out.feasible = true;
    out.witness = FlowAssignment{std::vector<std::vector<WeightedRoute>>(model.commodities.size())};
    return out;
  }
  ScalarRate rate = max_scalar_rate(model, rates, options);
  if (rate.unbounded) {
    out.feasible = true;
    out.witness = std::move(rate.assignment);
    return out;
  }
  if (rate.theta < 1) return out;
  out.feasible = true;
  for (auto& routes : rate.assignment.commodities) {
    for (auto& entry : routes) entry.weight /= rate.theta;
  }
  out.witness = std::move(rate.assignment);
  return out;
}

std::optional<std::string> check_witness(const ServiceModel& model, const RateVector& rates,
                                         const FlowAssignment& witness) {
  if (witness.commodities.size() != model.commodities.size()) return "witness commodity count mismatch";
  std::vector<Rational> link_load(model.net.link_count(), 0);
  std::vector<Rational> node_load(model.net.node_count(), 0);
  for (std::size_t c = 0; c < model.commodities.size(); ++c) {
    const Commodity& commodity = model.commodities[c];
    const LayeredGraph& lg = model.graph_of(c);
    const ServiceChain& chain = model.chains[commodity.chain];
    Rational total = 0;
    for (const auto& [route, weight] : witness.commodities[c]) {
      if (sgn(weight) < 0) return "negative route rate for commodity '" + commodity.id + "'";
      if (route.commodity != c) return "route filed under the wrong commodity";
      if (auto bad = route_violation(lg, route, commodity.source, commodity.destinations, commodity.anycast)) {
        return "invalid route for commodity '" + commodity.id + "': " + *bad;
      }
      total += weight;
      for (EdgeId e : route.edges) {
        const auto& edge = lg.edge(e);
        if (edge.kind == EdgeKind::kTransmission) {
          Rational w = 1;
          for (std::size_t i = 1; i <= edge.layer; ++i) w *= chain.function(i).scale;
          link_load[model.net.arc(edge.arc).link] += w * weight;
        } else {
          Rational x = chain.function(edge.layer).compute_at(edge.tail);
          for (std::size_t i = 1; i < edge.layer; ++i) x *= chain.function(i).scale;
          node_load[edge.tail] += x * weight;
        }
      }
    }
    if (total != rates.at(c)) {
      return "route rates of commodity '" + commodity.id + "' sum to " + to_string(total) + ", expected " +
             to_string(rates.at(c));
    }
  }
  for (LinkIndex e = 0; e < link_load.size(); ++e) {
    if (link_load[e] > model.net.link(e).capacity) {
      return "link " + std::to_string(e) + " overloaded: " + to_string(link_load[e]);
    }
  }
  for (NodeIndex u = 0; u < node_load.size(); ++u) {
    if (node_load[u] > model.net.node(u).compute_capacity) {
      return "node '" + model.net.node(u).name + "' overloaded: " + to_string(node_load[u]);
    }
  }
  return std::nullopt;
}

std::vector<Rational> route_edge_flow(const LayeredGraph& lg, const ScalingProfile& profile, const Route& route,
                                      const Rational& rate) {
  std::vector<Rational> flows(lg.edge_count(), 0);
  for (EdgeId e : route.edges) flows[e] += unit_load(lg, profile, e) * rate;
  return flows;
}

ConservationReport verify_conservation(const LayeredGraph& lg, std::span<const Rational> flows,
                                       const std::set<LayeredNodeId>& exempt) {
  if (flows.size() != lg.edge_count()) throw std::invalid_argument("flow vector size differs from the edge count");
  const ServiceChain& chain = lg.chain();
  ConservationReport report;
  for (LayeredNodeId v = 0; v < lg.node_count(); ++v) {
    if (exempt.contains(v)) continue;
    Rational in = 0;
    Rational out = 0;
    for (EdgeId e : lg.in_edges(v)) {
      const auto& edge = lg.edge(e);
      if (edge.kind == EdgeKind::kTransmission) {
        in += flows[e];
      } else {
        const auto& f = chain.function(edge.layer);
        in += flows[e] * f.scale / f.compute_at(edge.tail);
      }
    }
    for (EdgeId e : lg.out_edges(v)) {
      const auto& edge = lg.edge(e);
      if (edge.kind == EdgeKind::kTransmission) {
        out += flows[e];
      } else {
        out += flows[e] / chain.function(edge.layer).compute_at(edge.tail);
      }
    }
    if (in != out) report.residuals.push_back({v, in - out});
  }
  return report;
}

namespace {

// Micro-packet peeling of a unicast flow: repeatedly follows positive edges
// from the root and removes the bottleneck. Returns nullopt when the walk
// closes a cycle or leaves residual flow.
std::optional<std::vector<WeightedRoute>> peel_paths(const LayeredGraph& lg, const std::vector<Rational>& packets,
                                                     LayeredNodeId root, LayeredNodeId target, const mpz_class& z) {
  std::vector<mpz_class> micro(lg.edge_count());
  for (EdgeId e = 0; e < lg.edge_count(); ++e) micro[e] = Rational(packets[e] * Rational(z)).get_num();
  std::map<std::vector<EdgeId>, mpz_class> peeled;
  std::vector<bool> visited(lg.node_count(), false);
  while (true) {
    const auto& out_edges = lg.out_edges(root);
    if (std::none_of(out_edges.begin(), out_edges.end(), [&](EdgeId e) { return sgn(micro[e]) > 0; })) break;
    std::fill(visited.begin(), visited.end(), false);
    std::vector<EdgeId> path;
    LayeredNodeId v = root;
    visited[v] = true;
    while (v != target) {
      std::optional<EdgeId> next;
      for (EdgeId e : lg.out_edges(v)) {
        if (sgn(micro[e]) > 0) {
          next = e;
          break;
        }
      }
      if (!next) return std::nullopt;
      v = lg.edge(*next).to;
      if (visited[v]) return std::nullopt;
      visited[v] = true;
      path.push_back(*next);
    }
    mpz_class amount = micro[path.front()];
    for (EdgeId e : path) amount = std::min(amount, micro[e]);
    for (EdgeId e : path) micro[e] -= amount;
    peeled[path] += amount;
  }
  for (EdgeId e = 0; e < lg.edge_count(); ++e) {
    if (sgn(micro[e]) != 0) return std::nullopt;
  }
  std::vector<WeightedRoute> routes;
  for (const auto& [path, count] : peeled) {
    Rational weight(count, z);
    weight.canonicalize();
    routes.push_back({Route{0, RouteKind::kPath, path}, weight});
  }
  return routes;
}

// Exact combination of the routes inside the flow support, by LP over the
// per-edge packet counts.
std::vector<WeightedRoute> combine_support_routes(const LayeredGraph& lg, const std::vector<Rational>& packets,
                                                  NodeIndex source, std::span<const NodeIndex> destinations,
                                                  bool multicast, std::size_t max_routes) {
  std::vector<bool> support(lg.edge_count(), false);
  std::vector<std::size_t> row_of(lg.edge_count(), 0);
  std::vector<Rational> rhs;
  for (EdgeId e = 0; e < lg.edge_count(); ++e) {
    if (sgn(packets[e]) > 0) {
      support[e] = true;
      row_of[e] = rhs.size();
      rhs.push_back(packets[e]);
    }
  }
  auto candidates = enumerate_in(lg, source, destinations, multicast, 0, max_routes, &support);
  ExactLp lp(rhs);
  for (const auto& route : candidates) {
    LpColumn column;
    for (EdgeId e : route.edge_set()) column.entries.emplace_back(row_of[e], Rational(1));
    lp.add_column(std::move(column));
  }
  const LpSolution solution = lp.solve();
  if (solution.status != LpStatus::kOptimal) {
    throw DecompositionError(multicast ? "flow is not a combination of service chain arborescences"
                                       : "flow is not a combination of service chain paths");
  }
  std::vector<WeightedRoute> routes;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (sgn(solution.values[k]) > 0) routes.push_back({candidates[k], solution.values[k]});
  }
  return routes;
}

}  // namespace

Decomposition decompose_flow(const LayeredGraph& lg, std::span<const Rational> flows, NodeIndex source,
                             std::span<const NodeIndex> destinations, const EnumerationBounds& bounds) {
  if (flows.size() != lg.edge_count()) throw std::invalid_argument("flow vector size differs from the edge count");
  if (destinations.empty()) throw std::invalid_argument("decomposition needs a destination");
  const ScalingProfile profile(lg.chain());
  const LayeredNodeId root = lg.node(source, 0);

  // Packet units per edge and the micro-packet count z.
  std::vector<Rational> packets(lg.edge_count(), 0);
  mpz_class z = 1;
  for (EdgeId e = 0; e < lg.edge_count(); ++e) {
    if (sgn(flows[e]) < 0) throw DecompositionError("negative flow on edge " + std::to_string(e));
    if (sgn(flows[e]) == 0) continue;
    const Rational unit = unit_load(lg, profile, e);
    packets[e] = flows[e] / unit;
    z = lcm(z, packets[e].get_den());
    z = lcm(z, unit.get_num());
  }
  if (z > kMaxMicroPacketDenominator) throw DecompositionError("micro-packet count exceeds its cap");

  Decomposition out;
  const bool multicast = destinations.size() > 1;
  if (!multicast) {
    if (auto peeled = peel_paths(lg, packets, root, lg.node(destinations.front(), lg.chain_length()), z)) {
      out.routes = std::move(*peeled);
      out.micro_packets_per_packet = Rational(z);
      return out;
    }
  } else if (destinations.size() > bounds.max_terminals) {
    throw EnumerationLimitError("decomposition exceeds the enumeration terminal bound");
  }
  // Exact combination over the routes inside the support.
  out.routes = combine_support_routes(lg, packets, source, destinations, multicast, bounds.max_routes);
  for (const auto& wr : out.routes) z = lcm(z, wr.weight.get_den());
  if (z > kMaxMicroPacketDenominator) throw DecompositionError("micro-packet count exceeds its cap");
  out.micro_packets_per_packet = Rational(z);
  return out;
}

nlohmann::json assignment_to_json(const ServiceModel& model, const FlowAssignment& assignment) {
  nlohmann::json doc;
  doc["commodities"] = nlohmann::json::array();
  for (std::size_t c = 0; c < assignment.commodities.size(); ++c) {
    const LayeredGraph& lg = model.graph_of(c);
    nlohmann::json entry;
    entry["id"] = model.commodities[c].id;
    entry["routes"] = nlohmann::json::array();
    for (const auto& [route, weight] : assignment.commodities[c]) {
      nlohmann::json edges = nlohmann::json::array();
      for (EdgeId e : route.edges) {
        const auto& edge = lg.edge(e);
        edges.push_back({{"id", e},
                         {"kind", edge.kind == EdgeKind::kTransmission ? "transmit" : "process"},
                         {"from", model.net.node(edge.tail).name},
                         {"to", model.net.node(edge.head).name},
                         {"layer", edge.layer}});
      }
      entry["routes"].push_back({{"kind", route.kind == RouteKind::kPath ? "path" : "arborescence"},
                                 {"rate", to_string(weight)},
                                 {"edges", std::move(edges)}});
    }
    doc["commodities"].push_back(std::move(entry));
  }
  return doc;
}

}  // namespace ucnc
