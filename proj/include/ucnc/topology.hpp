#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ucnc/rational.hpp"

namespace ucnc {

using NodeIndex = std::size_t;
using LinkIndex = std::size_t;
using ArcIndex = std::size_t;

/// Malformed input document.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that parses but breaks a model invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Directionality { kDirected, kUndirected };

struct Node {
  std::string name;
  Rational compute_capacity;  // compute units per slot
};

struct Link {
  NodeIndex from = 0;
  NodeIndex to = 0;
  Rational capacity;  // flow units per slot
};

/// A directed traversal of a link. Directed networks have one arc per link;
/// undirected networks have two arcs per link that share its capacity.
struct Arc {
  NodeIndex from = 0;
  NodeIndex to = 0;
  LinkIndex link = 0;
};

/// Physical network: nodes with processing capacity, links with transmission
/// capacity. Immutable once constructed.
class Network {
 public:
  Network(std::vector<Node> nodes, std::vector<Link> links,
          Directionality directionality = Directionality::kDirected);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }
  Directionality directionality() const { return directionality_; }
  bool undirected() const { return directionality_ == Directionality::kUndirected; }

  const Node& node(NodeIndex u) const { return nodes_.at(u); }
  const Link& link(LinkIndex e) const { return links_.at(e); }
  const Arc& arc(ArcIndex a) const { return arcs_.at(a); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Arc>& arcs() const { return arcs_; }

  std::optional<NodeIndex> find_node(const std::string& name) const;
  NodeIndex node_index(const std::string& name) const;  // throws ValidationError

  /// Arcs leaving u, in increasing arc index order.
  const std::vector<ArcIndex>& out_arcs(NodeIndex u) const { return out_arcs_.at(u); }

  /// Hop distances from `source` along arcs (nullopt when unreachable).
  std::vector<std::optional<std::size_t>> hop_distances(NodeIndex source) const;
  /// Hop distances to `target` along arcs.
  std::vector<std::optional<std::size_t>> hop_distances_to(NodeIndex target) const;

  Rational total_compute_capacity() const;
  bool connected_as_undirected() const;

  friend bool operator==(const Network& a, const Network& b);

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<ArcIndex>> out_arcs_;
  Directionality directionality_;
};

/// Reads the `nodes`, `links` and `directionality` sections of a config
/// document.
Network network_from_json(const nlohmann::json& doc);
nlohmann::json network_to_json(const Network& net);

/// Parses a JSON config document and returns the validated network.
Network load_topology(const std::string& text);
std::string serialize_topology(const Network& net);

/// The 11-node Abilene backbone with unit link capacity in each direction and
/// unit compute capacity at nodes 3 and 8.
///
///   1 Seattle      5 Houston        9 Chicago
///   2 Sunnyvale    6 Kansas City   10 Washington
///   3 Denver       7 Atlanta       11 New York
///   4 Los Angeles  8 Indianapolis
Network abilene_preset();

/// Undirected Abilene edge list as 1-based node-number pairs.
const std::vector<std::pair<int, int>>& abilene_edges();

}  // namespace ucnc
