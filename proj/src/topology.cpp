#include "ucnc/topology.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <utility>

namespace ucnc {
namespace {

std::string id_string(const nlohmann::json& value, const char* what) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  throw ParseError(std::string(what) + " must be a string or integer");
}

Rational rational_field(const nlohmann::json& value, const char* what) {
  try {
    if (value.is_string()) return parse_rational(value.get<std::string>());
    if (value.is_number_integer()) return Rational(value.get<long>());
    if (value.is_number()) return rational_from_double(value.get<double>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
  throw ParseError(std::string(what) + " must be a number or a rational string");
}

}  // namespace

Network::Network(std::vector<Node> nodes, std::vector<Link> links, Directionality directionality)
    : nodes_(std::move(nodes)), links_(std::move(links)), directionality_(directionality) {
  std::set<std::string> names;
  for (const auto& node : nodes_) {
    if (node.name.empty()) throw ValidationError("node with empty id");
    if (!names.insert(node.name).second) throw ValidationError("duplicate node id '" + node.name + "'");
    if (sgn(node.compute_capacity) < 0) {
      throw ValidationError("negative compute capacity at node '" + node.name + "'");
    }
  }
  std::set<std::pair<NodeIndex, NodeIndex>> seen;
  for (const auto& link : links_) {
    if (link.from >= nodes_.size() || link.to >= nodes_.size()) {
      throw ValidationError("link references unknown node index");
    }
    const std::string label = "(" + nodes_[link.from].name + "," + nodes_[link.to].name + ")";
    if (link.from == link.to) throw ValidationError("self-loop link " + label);
    if (sgn(link.capacity) < 0) throw ValidationError("negative capacity on link " + label);
    auto key = std::make_pair(link.from, link.to);
    if (undirected() && key.first > key.second) std::swap(key.first, key.second);
    if (!seen.insert(key).second) throw ValidationError("duplicate link " + label);
  }

  out_arcs_.assign(nodes_.size(), {});
  for (LinkIndex e = 0; e < links_.size(); ++e) {
    arcs_.push_back({links_[e].from, links_[e].to, e});
    if (undirected()) arcs_.push_back({links_[e].to, links_[e].from, e});
  }
  for (ArcIndex a = 0; a < arcs_.size(); ++a) out_arcs_[arcs_[a].from].push_back(a);
}

std::optional<NodeIndex> Network::find_node(const std::string& name) const {
  for (NodeIndex u = 0; u < nodes_.size(); ++u) {
    if (nodes_[u].name == name) return u;
  }
  return std::nullopt;
}

NodeIndex Network::node_index(const std::string& name) const {
  if (auto u = find_node(name)) return *u;
  throw ValidationError("unknown node id '" + name + "'");
}

std::vector<std::optional<std::size_t>> Network::hop_distances(NodeIndex source) const {
  std::vector<std::optional<std::size_t>> dist(nodes_.size());
  std::deque<NodeIndex> frontier{source};
  dist[source] = 0;
  while (!frontier.empty()) {
    NodeIndex u = frontier.front();
    frontier.pop_front();
    for (ArcIndex a : out_arcs_[u]) {
      NodeIndex v = arcs_[a].to;
      if (!dist[v]) {
        dist[v] = *dist[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

std::vector<std::optional<std::size_t>> Network::hop_distances_to(NodeIndex target) const {
  std::vector<std::vector<NodeIndex>> in(nodes_.size());
  for (const auto& arc : arcs_) in[arc.to].push_back(arc.from);
  std::vector<std::optional<std::size_t>> dist(nodes_.size());
  std::deque<NodeIndex> frontier{target};
  dist[target] = 0;
  while (!frontier.empty()) {
    NodeIndex v = frontier.front();
    frontier.pop_front();
    for (NodeIndex u : in[v]) {
      if (!dist[u]) {
        dist[u] = *dist[v] + 1;
        frontier.push_back(u);
      }
    }
  }
  return dist;
}

Rational Network::total_compute_capacity() const {
  Rational total = 0;
  for (const auto& node : nodes_) total += node.compute_capacity;
  return total;
}

bool Network::connected_as_undirected() const {
  if (nodes_.empty()) return true;
  std::vector<std::vector<NodeIndex>> adj(nodes_.size());
  for (const auto& link : links_) {
    adj[link.from].push_back(link.to);
    adj[link.to].push_back(link.from);
  }
  std::vector<bool> seen(nodes_.size(), false);
  std::deque<NodeIndex> frontier{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!frontier.empty()) {
    NodeIndex u = frontier.front();
    frontier.pop_front();
    for (NodeIndex v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        frontier.push_back(v);
      }
    }
  }
  return count == nodes_.size();
}

bool operator==(const Network& a, const Network& b) {
  if (a.directionality_ != b.directionality_) return false;
  if (a.nodes_.size() != b.nodes_.size() || a.links_.size() != b.links_.size()) return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    if (a.nodes_[i].name != b.nodes_[i].name) return false;
    if (a.nodes_[i].compute_capacity != b.nodes_[i].compute_capacity) return false;
  }
  for (std::size_t i = 0; i < a.links_.size(); ++i) {
    const Link& x = a.links_[i];
    const Link& y = b.links_[i];
    if (x.from != y.from || x.to != y.to || x.capacity != y.capacity) return false;
  }
  return true;
}

Network network_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("config document must be a JSON object");
  Directionality directionality = Directionality::kDirected;
  if (doc.contains("directionality")) {
    const auto& d = doc.at("directionality");
    if (!d.is_string()) throw ParseError("directionality must be a string");
    const auto text = d.get<std::string>();
    if (text == "directed") {
      directionality = Directionality::kDirected;
    } else if (text == "undirected") {
      directionality = Directionality::kUndirected;
    } else {
      throw ParseError("directionality must be 'directed' or 'undirected'");
    }
  }
  if (!doc.contains("nodes") || !doc.at("nodes").is_array()) throw ParseError("missing 'nodes' array");

  std::vector<Node> nodes;
  for (const auto& entry : doc.at("nodes")) {
    if (!entry.is_object() || !entry.contains("id")) throw ParseError("node entry needs an 'id'");
    Node node;
    node.name = id_string(entry.at("id"), "node id");
    node.compute_capacity =
        entry.contains("compute_capacity") ? rational_field(entry.at("compute_capacity"), "compute_capacity")
                                           : Rational(0);
    nodes.push_back(std::move(node));
  }

  auto lookup = [&nodes](const std::string& name) -> NodeIndex {
    for (NodeIndex u = 0; u < nodes.size(); ++u) {
      if (nodes[u].name == name) return u;
    }
    throw ValidationError("link references unknown node id '" + name + "'");
  };

  std::vector<Link> links;
  if (doc.contains("links")) {
    if (!doc.at("links").is_array()) throw ParseError("'links' must be an array");
    for (const auto& entry : doc.at("links")) {
      if (!entry.is_object() || !entry.contains("from") || !entry.contains("to") || !entry.contains("capacity")) {
        throw ParseError("link entry needs 'from', 'to' and 'capacity'");
      }
      Link link;
      link.from = lookup(id_string(entry.at("from"), "link.from"));
      link.to = lookup(id_string(entry.at("to"), "link.to"));
      link.capacity = rational_field(entry.at("capacity"), "link capacity");
      links.push_back(std::move(link));
    }
  }
  return Network(std::move(nodes), std::move(links), directionality);
}

nlohmann::json network_to_json(const Network& net) {
  nlohmann::json doc;
  doc["directionality"] = net.undirected() ? "undirected" : "directed";
  doc["nodes"] = nlohmann::json::array();
  for (const auto& node : net.nodes()) {
    doc["nodes"].push_back({{"id", node.name}, {"compute_capacity", to_string(node.compute_capacity)}});
  }
  doc["links"] = nlohmann::json::array();
  for (const auto& link : net.links()) {
    doc["links"].push_back({{"from", net.node(link.from).name},
                            {"to", net.node(link.to).name},
                            {"capacity", to_string(link.capacity)}});
  }
  return doc;
}

Network load_topology(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed config: ") + e.what());
  }
  return network_from_json(doc);
}

std::string serialize_topology(const Network& net) { return network_to_json(net).dump(2); }

const std::vector<std::pair<int, int>>& abilene_edges() {
  static const std::vector<std::pair<int, int>> edges = {
      {1, 2}, {1, 3},  {2, 3}, {2, 4}, {3, 6}, {4, 5},  {5, 6},
      {5, 7}, {6, 8},  {7, 8}, {7, 10}, {8, 9}, {9, 11}, {10, 11},
  };
  return edges;
}

Network abilene_preset() {
  std::vector<Node> nodes;
  for (int i = 1; i <= 11; ++i) {
    nodes.push_back({std::to_string(i), Rational((i == 3 || i == 8) ? 1 : 0)});
  }
  std::vector<Link> links;
  for (auto [u, v] : abilene_edges()) {
    links.push_back({static_cast<NodeIndex>(u - 1), static_cast<NodeIndex>(v - 1), Rational(1)});
    links.push_back({static_cast<NodeIndex>(v - 1), static_cast<NodeIndex>(u - 1), Rational(1)});
  }
  return Network(std::move(nodes), std::move(links), Directionality::kDirected);
}

}  // namespace ucnc
