#include "ucnc/chaining.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace ucnc {
namespace {

Rational json_rational(const nlohmann::json& value, const char* what) {
  try {
    if (value.is_string()) return parse_rational(value.get<std::string>());
    if (value.is_number_integer()) return Rational(value.get<long>());
    if (value.is_number()) return rational_from_double(value.get<double>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
  throw ParseError(std::string(what) + " must be a number or a rational string");
}

std::string json_id(const nlohmann::json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  throw ParseError("node id must be a string or integer");
}

}  // namespace

void validate_chain(const ServiceChain& chain, const Network& net) {
  for (std::size_t i = 1; i <= chain.length(); ++i) {
    const auto& fn = chain.function(i);
    const std::string label = "chain '" + chain.id + "' function " + std::to_string(i);
    if (sgn(fn.compute_per_unit) <= 0) throw ValidationError(label + ": r must be positive");
    if (sgn(fn.scale) <= 0) throw ValidationError(label + ": xi must be positive");
    if (fn.hosts.empty()) throw ValidationError(label + ": no hosts");
    std::set<NodeIndex> unique(fn.hosts.begin(), fn.hosts.end());
    if (unique.size() != fn.hosts.size()) throw ValidationError(label + ": duplicate host");
    for (NodeIndex u : fn.hosts) {
      if (u >= net.node_count()) throw ValidationError(label + ": host not in network");
      if (sgn(net.node(u).compute_capacity) <= 0) {
        throw ValidationError(label + ": host '" + net.node(u).name + "' has no compute capacity");
      }
    }
    for (const auto& [u, r] : fn.host_compute) {
      if (!unique.contains(u)) throw ValidationError(label + ": compute override for a non-host");
      if (sgn(r) <= 0) throw ValidationError(label + ": host compute override must be positive");
    }
  }
}

ScalingProfile::ScalingProfile(const ServiceChain& chain) {
  w_.push_back(Rational(1));
  for (std::size_t i = 1; i <= chain.length(); ++i) {
    const auto& fn = chain.function(i);
    const Rational& before = w_.back();
    x_.push_back(fn.compute_per_unit * before);
    std::map<NodeIndex, Rational> overrides;
    for (const auto& [u, r] : fn.host_compute) overrides.emplace(u, r * before);
    x_override_.push_back(std::move(overrides));
    w_.push_back(before * fn.scale);
  }
}

Rational ScalingProfile::x_at(std::size_t function, NodeIndex u) const {
  const auto& overrides = x_override_.at(function - 1);
  auto it = overrides.find(u);
  return it == overrides.end() ? x_.at(function - 1) : it->second;
}

ScalingProfile scaling_profile(const ServiceChain& chain) { return ScalingProfile(chain); }

LayeredGraph::LayeredGraph(const Network& net, const ServiceChain& chain)
    : net_(net),
      chain_(chain),
      n_(net.node_count()),
      layers_(chain.length() + 1),
      arc_count_(net.arc_count()) {
  for (std::size_t i = 1; i <= chain.length(); ++i) {
    for (NodeIndex u : chain.function(i).hosts) {
      if (u >= n_) throw ValidationError("chain '" + chain.id + "' host not in network");
    }
  }
  for (std::size_t layer = 0; layer < layers_; ++layer) {
    for (ArcIndex a = 0; a < arc_count_; ++a) {
      const Arc& arc = net.arc(a);
      edges_.push_back({node(arc.from, layer), node(arc.to, layer), EdgeKind::kTransmission, layer, arc.from,
                        arc.to, a});
    }
  }
  transmission_count_ = edges_.size();
  for (std::size_t i = 1; i <= chain.length(); ++i) {
    std::vector<NodeIndex> hosts = chain.function(i).hosts;
    std::sort(hosts.begin(), hosts.end());
    for (NodeIndex u : hosts) {
      edges_.push_back({node(u, i - 1), node(u, i), EdgeKind::kComputation, i, u, u, 0});
    }
  }
  out_.assign(node_count(), {});
  in_.assign(node_count(), {});
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    out_[edges_[e].from].push_back(e);
    in_[edges_[e].to].push_back(e);
  }
}

std::optional<EdgeId> LayeredGraph::computation_edge(std::size_t function, NodeIndex u) const {
  if (function == 0 || function >= layers_) return std::nullopt;
  for (EdgeId e : out_[node(u, function - 1)]) {
    if (edges_[e].kind == EdgeKind::kComputation) return e;
  }
  return std::nullopt;
}

LayeredGraph build_layered_graph(const Network& net, const ServiceChain& chain) {
  return LayeredGraph(net, chain);
}

std::vector<EdgeId> Route::edge_set() const {
  std::vector<EdgeId> sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

Route make_route(const LayeredGraph& lg, std::size_t commodity, LayeredNodeId root,
                 std::span<const EdgeId> edge_set) {
  std::map<LayeredNodeId, std::vector<EdgeId>> children;
  for (EdgeId e : edge_set) children[lg.edge(e).from].push_back(e);
  for (auto& [v, list] : children) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  Route route;
  route.commodity = commodity;
  route.kind = RouteKind::kPath;
  std::set<LayeredNodeId> visited{root};
  std::vector<EdgeId> stack;
  auto push_children = [&](LayeredNodeId v) {
    auto it = children.find(v);
    if (it == children.end()) return;
    if (it->second.size() > 1) route.kind = RouteKind::kArborescence;
    for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit) stack.push_back(*rit);
  };
  push_children(root);
  while (!stack.empty()) {
    EdgeId e = stack.back();
    stack.pop_back();
    LayeredNodeId head = lg.edge(e).to;
    if (!visited.insert(head).second) continue;
    route.edges.push_back(e);
    push_children(head);
  }
  return route;
}

std::optional<std::string> route_violation(const LayeredGraph& lg, const Route& route, NodeIndex source,
                                           std::span<const NodeIndex> terminals, bool any_terminal) {
  const std::size_t top = lg.chain_length();
  const LayeredNodeId root = lg.node(source, 0);
  std::set<LayeredNodeId> terminal_nodes;
  for (NodeIndex d : terminals) terminal_nodes.insert(lg.node(d, top));

  std::map<LayeredNodeId, std::size_t> in_degree;
  std::map<LayeredNodeId, std::vector<EdgeId>> children;
  std::set<EdgeId> seen_edges;
  for (EdgeId e : route.edges) {
    if (e >= lg.edge_count()) return "edge id out of range";
    if (!seen_edges.insert(e).second) return "edge repeated";
    const auto& edge = lg.edge(e);
    if (++in_degree[edge.to] > 1) return "layered node entered twice";
    children[edge.from].push_back(e);
  }
  if (in_degree.contains(root)) return "root has an incoming edge";

  std::set<LayeredNodeId> reached{root};
  std::vector<LayeredNodeId> stack{root};
  while (!stack.empty()) {
    LayeredNodeId v = stack.back();
    stack.pop_back();
    for (EdgeId e : children[v]) {
      LayeredNodeId head = lg.edge(e).to;
      if (!reached.insert(head).second) return "cycle in route";
      stack.push_back(head);
    }
  }
  if (reached.size() != route.edges.size() + 1) return "edges not connected to the root";

  std::size_t terminals_reached = 0;
  for (LayeredNodeId v : reached) {
    bool is_terminal = terminal_nodes.contains(v);
    if (is_terminal) ++terminals_reached;
    if (children[v].empty() && !is_terminal) return "leaf is not a terminal";
    if (route.kind == RouteKind::kPath && children[v].size() > 1) return "path route branches";
  }
  if (any_terminal) {
    if (terminals_reached != 1) return "anycast route must reach exactly one destination";
  } else if (terminals_reached != terminal_nodes.size()) {
    return "terminal not reached";
  }
  if (route.kind == RouteKind::kPath && !any_terminal && terminal_nodes.size() > 1) {
    return "path route for several terminals";
  }
  return std::nullopt;
}

std::vector<PhysicalAction> map_to_physical(const LayeredGraph& lg, const Route& route) {
  std::map<LayeredNodeId, std::vector<EdgeId>> children;
  std::set<LayeredNodeId> has_parent;
  for (EdgeId e : route.edges) {
    children[lg.edge(e).from].push_back(e);
    has_parent.insert(lg.edge(e).to);
  }
  for (auto& [v, list] : children) std::sort(list.begin(), list.end());

  std::vector<PhysicalAction> actions;
  std::vector<LayeredNodeId> roots;
  for (const auto& [v, list] : children) {
    if (!has_parent.contains(v)) roots.push_back(v);
  }
  std::function<void(LayeredNodeId)> visit = [&](LayeredNodeId v) {
    const auto it = children.find(v);
    if (it == children.end()) return;
    if (it->second.size() > 1) {
      PhysicalAction dup;
      dup.kind = ActionKind::kDuplicate;
      dup.node = lg.physical(v);
      dup.stage = lg.layer_of(v);
      dup.copies = it->second.size();
      actions.push_back(dup);
    }
    for (EdgeId e : it->second) {
      const auto& edge = lg.edge(e);
      PhysicalAction action;
      action.edge = e;
      if (edge.kind == EdgeKind::kTransmission) {
        action.kind = ActionKind::kTransmit;
        action.node = edge.tail;
        action.next = edge.head;
        action.arc = edge.arc;
        action.stage = edge.layer;
      } else {
        action.kind = ActionKind::kProcess;
        action.node = edge.tail;
        action.next = edge.tail;
        action.function = edge.layer;
        action.stage = edge.layer - 1;
      }
      actions.push_back(action);
      visit(edge.to);
    }
  };
  for (LayeredNodeId r : roots) visit(r);
  return actions;
}

RouteLoad route_load(const LayeredGraph& lg, const ScalingProfile& profile, const Route& route) {
  RouteLoad load;
  for (EdgeId e : route.edges) {
    const auto& edge = lg.edge(e);
    if (edge.kind == EdgeKind::kTransmission) {
      load.link[lg.network().arc(edge.arc).link] += profile.w(edge.layer);
    } else {
      load.node[edge.tail] += profile.x_at(edge.layer, edge.tail);
    }
  }
  return load;
}

ServiceChain chain_from_json(const nlohmann::json& entry, const Network& net) {
  if (!entry.is_object()) throw ParseError("chain entry must be an object");
  ServiceChain chain;
  chain.id = entry.contains("id") ? json_id(entry.at("id")) : std::string{};
  if (entry.contains("functions")) {
    if (!entry.at("functions").is_array()) throw ParseError("'functions' must be an array");
    for (const auto& f : entry.at("functions")) {
      if (!f.is_object() || !f.contains("r") || !f.contains("xi") || !f.contains("hosts")) {
        throw ParseError("function entry needs 'r', 'xi' and 'hosts'");
      }
      ServiceFunction fn;
      fn.compute_per_unit = json_rational(f.at("r"), "function r");
      fn.scale = json_rational(f.at("xi"), "function xi");
      if (!f.at("hosts").is_array()) throw ParseError("'hosts' must be an array");
      for (const auto& h : f.at("hosts")) fn.hosts.push_back(net.node_index(json_id(h)));
      if (f.contains("host_r")) {
        if (!f.at("host_r").is_object()) throw ParseError("'host_r' must be an object");
        for (const auto& [name, value] : f.at("host_r").items()) {
          fn.host_compute[net.node_index(name)] = json_rational(value, "host_r");
        }
      }
      chain.functions.push_back(std::move(fn));
    }
  }
  validate_chain(chain, net);
  return chain;
}

nlohmann::json chain_to_json(const ServiceChain& chain, const Network& net) {
  nlohmann::json entry;
  entry["id"] = chain.id;
  entry["functions"] = nlohmann::json::array();
  for (const auto& fn : chain.functions) {
    nlohmann::json f;
    f["r"] = to_string(fn.compute_per_unit);
    f["xi"] = to_string(fn.scale);
    f["hosts"] = nlohmann::json::array();
    for (NodeIndex u : fn.hosts) f["hosts"].push_back(net.node(u).name);
    if (!fn.host_compute.empty()) {
      nlohmann::json overrides = nlohmann::json::object();
      for (const auto& [u, r] : fn.host_compute) overrides[net.node(u).name] = to_string(r);
      f["host_r"] = overrides;
    }
    entry["functions"].push_back(f);
  }
  return entry;
}

}  // namespace ucnc
