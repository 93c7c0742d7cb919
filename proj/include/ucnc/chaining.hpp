#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "ucnc/rational.hpp"
#include "ucnc/topology.hpp"

namespace ucnc {

struct ServiceFunction {
  Rational compute_per_unit;  // r: compute units per unit of input flow
  Rational scale;             // xi: output flow / input flow
  std::vector<NodeIndex> hosts;
  /// Location-dependent compute requirement r_u, overriding r at that host.
  std::map<NodeIndex, Rational> host_compute;

  const Rational& compute_at(NodeIndex u) const {
    auto it = host_compute.find(u);
    return it == host_compute.end() ? compute_per_unit : it->second;
  }
};

struct ServiceChain {
  std::string id;
  std::vector<ServiceFunction> functions;

  std::size_t length() const { return functions.size(); }
  /// Function i of the chain, 1-based.
  const ServiceFunction& function(std::size_t i) const { return functions.at(i - 1); }
};

/// Throws ValidationError unless r > 0, xi > 0, hosts nonempty and every host
/// exists in `net` with positive compute capacity.
void validate_chain(const ServiceChain& chain, const Network& net);

/// Cumulative per-layer scalings of a chain.
///   w(i) = xi_1 * ... * xi_i               (w(0) = 1)
///   x(i) = r_i * xi_1 * ... * xi_{i-1}     (i = 1..M)
class ScalingProfile {
 public:
  explicit ScalingProfile(const ServiceChain& chain);

  std::size_t length() const { return x_.size(); }
  const Rational& w(std::size_t layer) const { return w_.at(layer); }
  const Rational& x(std::size_t function) const { return x_.at(function - 1); }
  /// x(i) evaluated with the compute requirement of host u.
  Rational x_at(std::size_t function, NodeIndex u) const;

  const std::vector<Rational>& w_values() const { return w_; }
  const std::vector<Rational>& x_values() const { return x_; }

 private:
  std::vector<Rational> w_;
  std::vector<Rational> x_;
  std::vector<std::map<NodeIndex, Rational>> x_override_;
};

ScalingProfile scaling_profile(const ServiceChain& chain);

using LayeredNodeId = std::size_t;
using EdgeId = std::size_t;

enum class EdgeKind { kTransmission, kComputation };

struct LayeredEdge {
  LayeredNodeId from = 0;
  LayeredNodeId to = 0;
  EdgeKind kind = EdgeKind::kTransmission;
  /// Transmission: the layer (stage) it lives in. Computation: the 1-based
  /// function index, i.e. the layer it enters.
  std::size_t layer = 0;
  NodeIndex tail = 0;  // physical node at `from`
  NodeIndex head = 0;  // physical node at `to`
  ArcIndex arc = 0;    // transmission only
};

/// (M+1) stacked copies of the network joined by one computation edge per
/// host of each function. Layered node of (u, layer) is layer * n + u.
/// Edge ids: transmission edges first, layer-major in arc order, then
/// computation edges by function and ascending host.
class LayeredGraph {
 public:
  LayeredGraph(const Network& net, const ServiceChain& chain);

  std::size_t physical_node_count() const { return n_; }
  std::size_t layer_count() const { return layers_; }
  std::size_t chain_length() const { return layers_ - 1; }
  std::size_t node_count() const { return n_ * layers_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t transmission_edge_count() const { return transmission_count_; }
  std::size_t computation_edge_count() const { return edges_.size() - transmission_count_; }

  LayeredNodeId node(NodeIndex u, std::size_t layer) const { return layer * n_ + u; }
  NodeIndex physical(LayeredNodeId v) const { return v % n_; }
  std::size_t layer_of(LayeredNodeId v) const { return v / n_; }

  const LayeredEdge& edge(EdgeId e) const { return edges_.at(e); }
  const std::vector<LayeredEdge>& edges() const { return edges_; }
  const std::vector<EdgeId>& out_edges(LayeredNodeId v) const { return out_.at(v); }
  const std::vector<EdgeId>& in_edges(LayeredNodeId v) const { return in_.at(v); }

  /// Transmission edge for arc `a` at `layer`, computation edge of function
  /// i at host u (nullopt when u does not host it).
  EdgeId transmission_edge(ArcIndex a, std::size_t layer) const { return layer * arc_count_ + a; }
  std::optional<EdgeId> computation_edge(std::size_t function, NodeIndex u) const;

  const Network& network() const { return net_; }
  const ServiceChain& chain() const { return chain_; }

 private:
  Network net_;
  ServiceChain chain_;
  std::size_t n_;
  std::size_t layers_;
  std::size_t arc_count_;
  std::size_t transmission_count_;
  std::vector<LayeredEdge> edges_;
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::vector<EdgeId>> in_;
};

LayeredGraph build_layered_graph(const Network& net, const ServiceChain& chain);

enum class RouteKind { kPath, kArborescence };

/// A service chain path or service chain Steiner arborescence in one layered
/// graph. Path edges are stored in travel order; arborescence edges in
/// depth-first preorder from the root with children by ascending edge id.
struct Route {
  std::size_t commodity = 0;
  RouteKind kind = RouteKind::kPath;
  std::vector<EdgeId> edges;

  /// Edge ids sorted ascending; identifies the route as an edge set.
  std::vector<EdgeId> edge_set() const;
};

/// Builds a route from an unordered edge set rooted at `root`; edges that are
/// not reachable from the root are dropped. Kind is kPath when no node
/// branches.
Route make_route(const LayeredGraph& lg, std::size_t commodity, LayeredNodeId root,
                 std::span<const EdgeId> edge_set);

/// Returns a description of the first broken route invariant, or nullopt.
/// Checked: edges exist, the route is an arborescence rooted at source^(0)
/// (in-degree <= 1, no node revisited), every leaf is a terminal^(M), every
/// terminal is reached, and path routes do not branch. With `any_terminal`
/// the route must reach exactly one of the terminals (anycast).
std::optional<std::string> route_violation(const LayeredGraph& lg, const Route& route, NodeIndex source,
                                           std::span<const NodeIndex> terminals, bool any_terminal = false);

enum class ActionKind { kTransmit, kProcess, kDuplicate };

struct PhysicalAction {
  ActionKind kind = ActionKind::kTransmit;
  NodeIndex node = 0;      // tail node for kTransmit
  NodeIndex next = 0;      // head node for kTransmit
  ArcIndex arc = 0;        // kTransmit
  std::size_t stage = 0;   // packet stage while the action happens
  std::size_t function = 0;  // kProcess: 1-based function index
  std::size_t copies = 0;    // kDuplicate: number of outgoing copies
  EdgeId edge = 0;           // originating layered edge (kTransmit/kProcess)

  friend bool operator==(const PhysicalAction&, const PhysicalAction&) = default;
};

/// Physical reading of a route in depth-first preorder. Branching layered
/// nodes emit one kDuplicate before their outgoing actions.
std::vector<PhysicalAction> map_to_physical(const LayeredGraph& lg, const Route& route);

/// Per-packet resource loads of a route: flow units per link and compute
/// units per node (w and x scalings applied, host overrides respected).
/// Undirected networks charge both travel directions to the same link.
struct RouteLoad {
  std::map<LinkIndex, Rational> link;
  std::map<NodeIndex, Rational> node;
};
RouteLoad route_load(const LayeredGraph& lg, const ScalingProfile& profile, const Route& route);

ServiceChain chain_from_json(const nlohmann::json& entry, const Network& net);
nlohmann::json chain_to_json(const ServiceChain& chain, const Network& net);

}  // namespace ucnc
