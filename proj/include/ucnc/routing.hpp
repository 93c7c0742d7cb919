#pragma once

// Minimum-cost route search on a layered graph, generic over the cost type so
// the simulator (double) and the capacity oracle (Rational) share it.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "ucnc/chaining.hpp"

namespace ucnc {

class RoutingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maximum number of terminals handled by the exact Steiner solver.
inline constexpr std::size_t kExactSteinerTerminalBound = 8;

template <typename Cost>
struct CostTraits;

template <>
struct CostTraits<double> {
  static double from_rational(const Rational& r) { return r.get_d(); }
  static bool same(double a, double b) {
    return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
  }
};

template <>
struct CostTraits<Rational> {
  static Rational from_rational(const Rational& r) { return r; }
  static bool same(const Rational& a, const Rational& b) { return a == b; }
};

/// Cost of every layered edge given per-link and per-node prices:
/// transmission edge at layer i on link e costs w(i) * price_e, computation
/// edge of function i at u costs x_u(i) * price_u.
template <typename Cost>
std::vector<Cost> weighted_edge_costs(const LayeredGraph& lg, const ScalingProfile& profile,
                                      std::span<const Cost> link_price, std::span<const Cost> node_price) {
  std::vector<Cost> w(lg.layer_count());
  for (std::size_t i = 0; i < lg.layer_count(); ++i) w[i] = CostTraits<Cost>::from_rational(profile.w(i));
  std::vector<Cost> costs(lg.edge_count());
  for (EdgeId e = 0; e < lg.edge_count(); ++e) {
    const auto& edge = lg.edge(e);
    if (edge.kind == EdgeKind::kTransmission) {
      costs[e] = w[edge.layer] * link_price[lg.network().arc(edge.arc).link];
    } else {
      costs[e] = CostTraits<Cost>::from_rational(profile.x_at(edge.layer, edge.tail)) * node_price[edge.tail];
    }
  }
  return costs;
}

template <typename Cost>
Cost route_cost(const Route& route, std::span<const Cost> costs) {
  Cost total = Cost(0);
  for (EdgeId e : route.edges) total += costs[e];
  return total;
}

namespace detail {

template <typename Cost>
struct Label {
  bool reached = false;
  Cost cost = Cost(0);
  std::size_t hops = 0;
  EdgeId via = 0;  // edge used to reach the node on its best path
  bool has_via = false;
};

template <typename Cost>
bool label_less(const Cost& cost_a, std::size_t hops_a, const Label<Cost>& b) {
  if (!b.reached) return true;
  if (cost_a < b.cost) return true;
  if (b.cost < cost_a) return false;
  return hops_a < b.hops;
}

/// Dijkstra ordered by (cost, hops). `reverse` follows edges backwards so
/// labels are distances *to* the seeds. Seeds carry their starting labels.
template <typename Cost>
std::vector<Label<Cost>> dijkstra(const LayeredGraph& lg, std::span<const Cost> costs,
                                  std::vector<Label<Cost>> labels, bool reverse,
                                  const std::vector<bool>* allowed_edges = nullptr) {
  struct Entry {
    Cost cost;
    std::size_t hops;
    LayeredNodeId node;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (b.cost < a.cost) return true;
    if (a.cost < b.cost) return false;
    if (a.hops != b.hops) return a.hops > b.hops;
    return a.node > b.node;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  for (LayeredNodeId v = 0; v < labels.size(); ++v) {
    if (labels[v].reached) heap.push({labels[v].cost, labels[v].hops, v});
  }
  std::vector<bool> done(labels.size(), false);
  while (!heap.empty()) {
    Entry top = heap.top();
    heap.pop();
    if (done[top.node]) continue;
    if (top.cost != labels[top.node].cost || top.hops != labels[top.node].hops) continue;
    done[top.node] = true;
    const auto& adjacent = reverse ? lg.in_edges(top.node) : lg.out_edges(top.node);
    for (EdgeId e : adjacent) {
      if (allowed_edges && !(*allowed_edges)[e]) continue;
      const auto& edge = lg.edge(e);
      LayeredNodeId next = reverse ? edge.from : edge.to;
      if (done[next]) continue;
      Cost candidate = top.cost + costs[e];
      std::size_t hops = top.hops + 1;
      Label<Cost>& label = labels[next];
      if (label_less(candidate, hops, label) ||
          (label.reached && candidate == label.cost && hops == label.hops && label.has_via && e < label.via)) {
        label.reached = true;
        label.cost = candidate;
        label.hops = hops;
        label.via = e;
        label.has_via = true;
        heap.push({candidate, hops, next});
      }
    }
  }
  return labels;
}

/// Minimum (cost, hops) path from `root` to the nearest of `targets`; among
/// those, the lexicographically smallest edge-id sequence.
template <typename Cost>
std::optional<std::vector<EdgeId>> best_path(const LayeredGraph& lg, std::span<const Cost> costs,
                                             LayeredNodeId root, std::span<const LayeredNodeId> targets,
                                             const std::vector<bool>* allowed_edges = nullptr) {
  std::vector<Label<Cost>> seeds(lg.node_count());
  for (LayeredNodeId t : targets) {
    seeds[t].reached = true;
    seeds[t].cost = Cost(0);
    seeds[t].hops = 0;
  }
  auto to_target = dijkstra<Cost>(lg, costs, std::move(seeds), /*reverse=*/true, allowed_edges);
  if (!to_target[root].reached) return std::nullopt;
  std::vector<EdgeId> path;
  LayeredNodeId at = root;
  while (to_target[at].hops > 0) {
    std::optional<EdgeId> chosen;
    for (EdgeId e : lg.out_edges(at)) {
      if (allowed_edges && !(*allowed_edges)[e]) continue;
      LayeredNodeId next = lg.edge(e).to;
      const auto& label = to_target[next];
      if (!label.reached || label.hops + 1 != to_target[at].hops) continue;
      if (!CostTraits<Cost>::same(costs[e] + label.cost, to_target[at].cost)) continue;
      chosen = e;
      break;  // out_edges are in ascending id order
    }
    if (!chosen) chosen = to_target[at].via;  // numerical fallback: the Dijkstra tree edge
    path.push_back(*chosen);
    at = lg.edge(*chosen).to;
  }
  return path;
}

/// Minimum-cost arborescence inside `edge_set` rooted at `root`, pruned to
/// the branches that lead to `terminals`.
template <typename Cost>
std::vector<EdgeId> prune_to_arborescence(const LayeredGraph& lg, std::span<const Cost> costs, LayeredNodeId root,
                                          std::span<const LayeredNodeId> terminals,
                                          std::span<const EdgeId> edge_set) {
  std::vector<bool> allowed(lg.edge_count(), false);
  for (EdgeId e : edge_set) allowed[e] = true;
  std::vector<Label<Cost>> seeds(lg.node_count());
  seeds[root].reached = true;
  auto from_root = dijkstra<Cost>(lg, costs, std::move(seeds), /*reverse=*/false, &allowed);
  std::set<EdgeId> kept;
  for (LayeredNodeId t : terminals) {
    if (!from_root[t].reached) throw RoutingError("terminal lost while pruning route");
    LayeredNodeId at = t;
    while (at != root) {
      EdgeId e = from_root[at].via;
      if (!kept.insert(e).second) break;
      at = lg.edge(e).from;
    }
  }
  return {kept.begin(), kept.end()};
}

/// Chu-Liu/Edmonds minimum arborescence on a small dense digraph. Returns the
/// indices of the selected edges, or nullopt if some node is unreachable.
template <typename Cost>
struct ClosureEdge {
  std::size_t from;
  std::size_t to;
  Cost weight;
};

template <typename Cost>
std::optional<std::vector<std::size_t>> min_arborescence(std::size_t node_count, std::size_t root,
                                                         const std::vector<ClosureEdge<Cost>>& edges) {
  std::vector<std::optional<std::size_t>> best_in(node_count);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (e.to == root || e.from == e.to) continue;
    if (!best_in[e.to] || e.weight < edges[*best_in[e.to]].weight) best_in[e.to] = i;
  }
  for (std::size_t v = 0; v < node_count; ++v) {
    if (v != root && !best_in[v]) return std::nullopt;
  }
  // Find a cycle among the chosen in-edges.
  std::vector<int> color(node_count, 0);
  std::vector<std::size_t> cycle;
  for (std::size_t start = 0; start < node_count && cycle.empty(); ++start) {
    std::vector<std::size_t> trail;
    std::size_t v = start;
    while (v != root && color[v] == 0) {
      color[v] = 1;
      trail.push_back(v);
      v = edges[*best_in[v]].from;
    }
    if (v != root && color[v] == 1) {
      auto it = std::find(trail.begin(), trail.end(), v);
      cycle.assign(it, trail.end());
    }
    for (std::size_t u : trail) color[u] = 2;
  }
  if (cycle.empty()) {
    std::vector<std::size_t> chosen;
    for (std::size_t v = 0; v < node_count; ++v) {
      if (v != root) chosen.push_back(*best_in[v]);
    }
    return chosen;
  }
  // Contract the cycle into a single node and recurse.
  std::vector<bool> in_cycle(node_count, false);
  for (std::size_t v : cycle) in_cycle[v] = true;
  std::vector<std::size_t> remap(node_count);
  std::size_t next_id = 0;
  for (std::size_t v = 0; v < node_count; ++v) {
    if (!in_cycle[v]) remap[v] = next_id++;
  }
  const std::size_t contracted = next_id;
  for (std::size_t v : cycle) remap[v] = contracted;
  std::vector<ClosureEdge<Cost>> reduced;
  std::vector<std::size_t> origin;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    std::size_t from = remap[e.from];
    std::size_t to = remap[e.to];
    if (from == to) continue;
    Cost weight = e.weight;
    if (in_cycle[e.to]) weight = weight - edges[*best_in[e.to]].weight;
    reduced.push_back({from, to, weight});
    origin.push_back(i);
  }
  auto inner = min_arborescence<Cost>(contracted + 1, remap[root], reduced);
  if (!inner) return std::nullopt;
  std::vector<std::size_t> chosen;
  std::optional<std::size_t> entering;
  for (std::size_t k : *inner) {
    std::size_t i = origin[k];
    chosen.push_back(i);
    if (in_cycle[edges[i].to]) entering = edges[i].to;
  }
  for (std::size_t v : cycle) {
    if (entering && v == *entering) continue;
    chosen.push_back(*best_in[v]);
  }
  return chosen;
}

inline std::vector<LayeredNodeId> terminal_nodes(const LayeredGraph& lg, std::span<const NodeIndex> destinations) {
  std::vector<LayeredNodeId> nodes;
  for (NodeIndex d : destinations) nodes.push_back(lg.node(d, lg.chain_length()));
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

}  // namespace detail

/// Shortest service chain path s^(0) -> d^(M). Ties: fewer hops, then the
/// lexicographically smallest edge-id sequence.
template <typename Cost>
Route select_route_unicast(const LayeredGraph& lg, std::span<const Cost> costs, NodeIndex source,
                           NodeIndex destination, std::size_t commodity = 0) {
  const LayeredNodeId target = lg.node(destination, lg.chain_length());
  auto path = detail::best_path<Cost>(lg, costs, lg.node(source, 0), std::span<const LayeredNodeId>(&target, 1));
  if (!path) throw RoutingError("destination unreachable through the service chain");
  return Route{commodity, RouteKind::kPath, std::move(*path)};
}

/// Shortest path to any one destination (zero-cost links to a virtual sink).
template <typename Cost>
Route select_route_anycast(const LayeredGraph& lg, std::span<const Cost> costs, NodeIndex source,
                           std::span<const NodeIndex> destinations, std::size_t commodity = 0) {
  auto targets = detail::terminal_nodes(lg, destinations);
  auto path = detail::best_path<Cost>(lg, costs, lg.node(source, 0), targets);
  if (!path) throw RoutingError("no destination reachable through the service chain");
  return Route{commodity, RouteKind::kPath, std::move(*path)};
}

/// Exact minimum-cost service chain Steiner arborescence (Dreyfus-Wagner over
/// terminal subsets on the directed layered graph).
template <typename Cost>
Route select_route_multicast(const LayeredGraph& lg, std::span<const Cost> costs, NodeIndex source,
                             std::span<const NodeIndex> destinations, std::size_t commodity = 0) {
  const LayeredNodeId root = lg.node(source, 0);
  auto terminals = detail::terminal_nodes(lg, destinations);
  std::erase(terminals, root);
  if (terminals.size() > kExactSteinerTerminalBound) {
    throw RoutingError("terminal count exceeds the exact Steiner bound; use the approximate solver");
  }
  if (terminals.empty()) return Route{commodity, RouteKind::kPath, {}};
  if (terminals.size() == 1) {
    auto path = detail::best_path<Cost>(lg, costs, root, terminals);
    if (!path) throw RoutingError("terminal unreachable through the service chain");
    return Route{commodity, RouteKind::kPath, std::move(*path)};
  }

  const std::size_t k = terminals.size();
  const std::size_t full = (std::size_t{1} << k) - 1;
  const std::size_t n = lg.node_count();

  struct Back {
    enum class Kind { kNone, kBase, kSplit, kEdge } kind = Kind::kNone;
    std::size_t subset = 0;  // kSplit: one side
    EdgeId edge = 0;         // kEdge / kBase: first edge toward the subtree
  };
  std::vector<std::vector<detail::Label<Cost>>> dp(full + 1);
  std::vector<std::vector<Back>> back(full + 1, std::vector<Back>(n));

  for (std::size_t t = 0; t < k; ++t) {
    std::vector<detail::Label<Cost>> seeds(n);
    seeds[terminals[t]].reached = true;
    auto labels = detail::dijkstra<Cost>(lg, costs, std::move(seeds), /*reverse=*/true);
    const std::size_t mask = std::size_t{1} << t;
    for (LayeredNodeId v = 0; v < n; ++v) {
      if (labels[v].reached && labels[v].has_via) back[mask][v] = {Back::Kind::kBase, 0, labels[v].via};
    }
    dp[mask] = std::move(labels);
  }

  std::vector<std::size_t> order;
  for (std::size_t s = 1; s <= full; ++s) {
    if (std::popcount(s) >= 2) order.push_back(s);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](std::size_t a, std::size_t b) { return std::popcount(a) < std::popcount(b); });

  for (std::size_t s : order) {
    std::vector<detail::Label<Cost>> merged(n);
    const std::size_t low = s & (~s + 1);
    for (LayeredNodeId v = 0; v < n; ++v) {
      for (std::size_t a = (s - 1) & s; a > 0; a = (a - 1) & s) {
        if (!(a & low)) continue;
        const std::size_t b = s ^ a;
        const auto& la = dp[a][v];
        const auto& lb = dp[b][v];
        if (!la.reached || !lb.reached) continue;
        Cost total = la.cost + lb.cost;
        std::size_t hops = la.hops + lb.hops;
        if (detail::label_less(total, hops, merged[v])) {
          merged[v].reached = true;
          merged[v].cost = total;
          merged[v].hops = hops;
          merged[v].has_via = false;
          back[s][v] = {Back::Kind::kSplit, a, 0};
        }
      }
    }
    auto labels = detail::dijkstra<Cost>(lg, costs, merged, /*reverse=*/true);
    for (LayeredNodeId v = 0; v < n; ++v) {
      if (labels[v].reached && labels[v].has_via) back[s][v] = {Back::Kind::kEdge, 0, labels[v].via};
    }
    dp[s] = std::move(labels);
  }
  if (!dp[full][root].reached) throw RoutingError("terminal unreachable through the service chain");

  std::vector<EdgeId> collected;
  std::vector<std::pair<std::size_t, LayeredNodeId>> work{{full, root}};
  while (!work.empty()) {
    auto [s, v] = work.back();
    work.pop_back();
    const Back& b = back[s][v];
    switch (b.kind) {
      case Back::Kind::kNone:
        break;  // v is the lone terminal of s
      case Back::Kind::kBase:
      case Back::Kind::kEdge:
        collected.push_back(b.edge);
        work.push_back({s, lg.edge(b.edge).to});
        break;
      case Back::Kind::kSplit:
        work.push_back({b.subset, v});
        work.push_back({s ^ b.subset, v});
        break;
    }
  }
  std::sort(collected.begin(), collected.end());
  collected.erase(std::unique(collected.begin(), collected.end()), collected.end());
  auto tree = detail::prune_to_arborescence<Cost>(lg, costs, root, terminals, collected);
  Route route = make_route(lg, commodity, root, tree);
  route.kind = RouteKind::kArborescence;
  return route;
}

/// Approximate Steiner arborescence: minimum arborescence over the directed
/// metric closure of {source} + terminals, expanded into shortest paths and
/// pruned. Exact when there is a single terminal.
template <typename Cost>
Route select_route_approx(const LayeredGraph& lg, std::span<const Cost> costs, NodeIndex source,
                          std::span<const NodeIndex> destinations, std::size_t commodity = 0) {
  const LayeredNodeId root = lg.node(source, 0);
  auto terminals = detail::terminal_nodes(lg, destinations);
  std::erase(terminals, root);
  if (terminals.empty()) return Route{commodity, RouteKind::kPath, {}};
  if (terminals.size() == 1) {
    auto path = detail::best_path<Cost>(lg, costs, root, terminals);
    if (!path) throw RoutingError("terminal unreachable through the service chain");
    return Route{commodity, RouteKind::kPath, std::move(*path)};
  }

  std::vector<LayeredNodeId> points{root};
  points.insert(points.end(), terminals.begin(), terminals.end());
  std::vector<std::vector<detail::Label<Cost>>> from(points.size());
  std::vector<detail::ClosureEdge<Cost>> closure;
  std::vector<std::pair<std::size_t, std::size_t>> closure_ends;
  for (std::size_t a = 0; a < points.size(); ++a) {
    std::vector<detail::Label<Cost>> seeds(lg.node_count());
    seeds[points[a]].reached = true;
    from[a] = detail::dijkstra<Cost>(lg, costs, std::move(seeds), /*reverse=*/false);
    for (std::size_t b = 1; b < points.size(); ++b) {
      if (a == b || !from[a][points[b]].reached) continue;
      closure.push_back({a, b, from[a][points[b]].cost});
      closure_ends.push_back({a, b});
    }
  }
  auto chosen = detail::min_arborescence<Cost>(points.size(), 0, closure);
  if (!chosen) throw RoutingError("terminal unreachable through the service chain");

  std::vector<EdgeId> collected;
  for (std::size_t idx : *chosen) {
    auto [a, b] = closure_ends[idx];
    LayeredNodeId at = points[b];
    while (at != points[a]) {
      EdgeId e = from[a][at].via;
      collected.push_back(e);
      at = lg.edge(e).from;
    }
  }
  std::sort(collected.begin(), collected.end());
  collected.erase(std::unique(collected.begin(), collected.end()), collected.end());
  auto tree = detail::prune_to_arborescence<Cost>(lg, costs, root, terminals, collected);
  Route route = make_route(lg, commodity, root, tree);
  route.kind = RouteKind::kArborescence;
  return route;
}

}  // namespace ucnc
