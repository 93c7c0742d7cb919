#include "ucnc/dataplane.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ucnc {
namespace {

constexpr double kWorkEpsilon = 1e-9;

}  // namespace

std::strong_ordering ento_priority(const Packet& p, const Packet& q) {
  if (auto c = p.hops <=> q.hops; c != 0) return c;
  if (auto c = p.arrival_slot <=> q.arrival_slot; c != 0) return c;
  return p.seq <=> q.seq;
}

std::strong_ordering fifo_priority(const Packet& p, const Packet& q) {
  if (auto c = p.queue_arrival_slot <=> q.queue_arrival_slot; c != 0) return c;
  return p.seq <=> q.seq;
}

namespace {

std::strong_ordering priority(Discipline discipline, const Packet& p, const Packet& q) {
  return discipline == Discipline::kEnto ? ento_priority(p, q) : fifo_priority(p, q);
}

}  // namespace

bool PhysicalQueue::Order::operator()(const Packet& a, const Packet& b) const {
  return priority(discipline, a, b) > 0;
}

void PhysicalQueue::push(Packet packet) {
  backlog_ += packet.remaining;
  heap_.push_back(std::move(packet));
  std::push_heap(heap_.begin(), heap_.end(), Order{discipline_});
}

Packet PhysicalQueue::pop() {
  std::pop_heap(heap_.begin(), heap_.end(), Order{discipline_});
  Packet packet = std::move(heap_.back());
  heap_.pop_back();
  backlog_ -= packet.remaining;
  if (heap_.empty()) backlog_ = 0.0;
  return packet;
}

void PhysicalQueue::serve_top(double amount) {
  heap_.front().remaining -= amount;
  backlog_ -= amount;
}

Dataplane::Dataplane(std::shared_ptr<const ServiceModel> model, DataplaneOptions options)
    : model_(std::move(model)), options_(options) {
  const Network& net = model_->net;
  for (const auto& link : net.links()) capacity_.push_back(to_double(link.capacity));
  for (const auto& node : net.nodes()) capacity_.push_back(to_double(node.compute_capacity));
  queues_.assign(capacity_.size(), PhysicalQueue(options_.discipline));
  injected_.assign(capacity_.size(), 0.0);
  served_.assign(capacity_.size(), 0.0);
  for (std::size_t c = 0; c < model_->chains.size(); ++c) {
    const auto& lg = model_->graphs[c];
    const auto& profile = model_->profiles[c];
    std::vector<double> w;
    for (std::size_t i = 0; i < lg.layer_count(); ++i) w.push_back(to_double(profile.w(i)));
    w_.push_back(std::move(w));
    std::vector<double> work(lg.edge_count());
    for (EdgeId e = 0; e < lg.edge_count(); ++e) {
      const auto& edge = lg.edge(e);
      work[e] = edge.kind == EdgeKind::kTransmission ? to_double(profile.w(edge.layer))
                                                     : to_double(profile.x_at(edge.layer, edge.tail));
    }
    edge_work_.push_back(std::move(work));
  }
  const std::size_t commodities = model_->commodities.size();
  log_.delivered.assign(commodities, 0);
  log_.delays.assign(commodities, {});
  log_.admitted.assign(commodities, 0);
}

std::size_t Dataplane::queue_of(EdgeId edge, const LayeredGraph& lg) const {
  const auto& e = lg.edge(edge);
  if (e.kind == EdgeKind::kTransmission) return model_->net.arc(e.arc).link;
  return model_->net.link_count() + e.tail;
}

std::shared_ptr<const ActiveRoute> Dataplane::activate(const Route& route) const {
  const Commodity& commodity = model_->commodities.at(route.commodity);
  const LayeredGraph& lg = model_->graph_of(route.commodity);
  auto active = std::make_shared<ActiveRoute>();
  active->route = route;
  const LayeredNodeId root = lg.node(commodity.source, 0);
  std::vector<LayeredNodeId> nodes{root};
  for (EdgeId e : route.edges) {
    active->children[lg.edge(e).from].push_back(e);
    nodes.push_back(lg.edge(e).to);
  }
  for (auto& [v, list] : active->children) std::sort(list.begin(), list.end());
  const std::size_t top = lg.chain_length();
  for (LayeredNodeId v : nodes) {
    if (lg.layer_of(v) != top) continue;
    const NodeIndex u = lg.physical(v);
    if (std::find(commodity.destinations.begin(), commodity.destinations.end(), u) !=
        commodity.destinations.end()) {
      active->terminals.push_back(v);
    }
  }
  if (active->terminals.empty()) throw ConsistencyError("route reaches no destination");
  return active;
}

void Dataplane::admit(std::uint64_t count, const Route& route, std::uint64_t slot) {
  if (count == 0) return;
  auto active = activate(route);
  const Commodity& commodity = model_->commodities.at(route.commodity);
  const LayeredGraph& lg = model_->graph_of(route.commodity);
  for (std::uint64_t k = 0; k < count; ++k) {
    Packet packet;
    packet.commodity = route.commodity;
    packet.route = active;
    packet.at = lg.node(commodity.source, 0);
    packet.stage = 0;
    packet.hops = 0;
    packet.size = 1.0;
    packet.arrival_slot = slot;
    packet.seq = next_seq_++;
    packet.group = next_group_++;
    groups_.emplace(packet.group, Group{route.commodity, slot, active->terminals.size()});
    ++log_.admitted[route.commodity];
    arrive(std::move(packet), slot);
  }
}

void Dataplane::enqueue(Packet packet, EdgeId edge, std::uint64_t slot) {
  const LayeredGraph& lg = model_->graph_of(packet.commodity);
  const std::size_t chain = model_->commodities[packet.commodity].chain;
  packet.edge = edge;
  packet.remaining = edge_work_[chain][edge];
  packet.queue_arrival_slot = slot;
  const std::size_t q = queue_of(edge, lg);
  injected_[q] += packet.remaining;
  queues_[q].push(std::move(packet));
}

void Dataplane::arrive(Packet packet, std::uint64_t slot) {
  const LayeredGraph& lg = model_->graph_of(packet.commodity);
  const std::size_t hop_bound = lg.node_count();
  if (packet.hops > hop_bound) {
    throw ConsistencyError("packet exceeded the hop bound of " + std::to_string(hop_bound));
  }
  audit_.max_hops_seen = std::max(audit_.max_hops_seen, packet.hops);
  const ActiveRoute& route = *packet.route;

  const bool at_terminal =
      std::find(route.terminals.begin(), route.terminals.end(), packet.at) != route.terminals.end();
  if (at_terminal) {
    auto it = groups_.find(packet.group);
    if (it == groups_.end()) throw ConsistencyError("delivery for an unknown packet group");
    if (--it->second.outstanding == 0) {
      const std::size_t c = it->second.commodity;
      ++log_.delivered[c];
      log_.delays[c].push_back(static_cast<std::uint32_t>(slot - it->second.arrival_slot));
      groups_.erase(it);
    }
  }

  auto children = route.children.find(packet.at);
  if (children == route.children.end()) {
    if (!at_terminal) throw ConsistencyError("packet stranded at a non-terminal layered node");
    return;
  }
  const auto& out = children->second;
  if (out.size() > 1) ++audit_.duplications;
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    Packet copy = packet;
    copy.seq = next_seq_++;
    if (options_.audit && copy.hops != packet.hops) ++audit_.inheritance_violations;
    enqueue(std::move(copy), out[i], slot);
  }
  enqueue(std::move(packet), out.back(), slot);
}

void Dataplane::step(std::uint64_t slot) {
  std::vector<Packet> completed;
  for (std::size_t q = 0; q < queues_.size(); ++q) {
    PhysicalQueue& queue = queues_[q];
    if (queue.empty()) continue;
    std::vector<Packet> expected;
    const double backlog_before = queue.backlog();
    if (options_.audit) expected = queue.snapshot();
    std::vector<std::uint64_t> served_order;
    double budget = capacity_[q];
    while (budget > kWorkEpsilon && !queue.empty()) {
      const double amount = std::min(budget, queue.top().remaining);
      queue.serve_top(amount);
      budget -= amount;
      served_[q] += amount;
      if (options_.audit) served_order.push_back(queue.top().seq);
      if (queue.top().remaining <= kWorkEpsilon) {
        completed.push_back(queue.pop());
      } else {
        break;
      }
    }
    if (options_.audit) {
      ++audit_.queue_slots_checked;
      const std::size_t prefix = std::min(served_order.size(), expected.size());
      std::partial_sort(expected.begin(), expected.begin() + static_cast<std::ptrdiff_t>(prefix), expected.end(),
                        [this](const Packet& a, const Packet& b) { return priority(options_.discipline, a, b) < 0; });
      for (std::size_t i = 0; i < served_order.size(); ++i) {
        if (i >= expected.size() || expected[i].seq != served_order[i]) {
          ++audit_.order_violations;
          break;
        }
      }
      const double served_now = capacity_[q] - std::max(budget, 0.0);
      const double due = std::min(capacity_[q], backlog_before);
      if (std::abs(served_now - due) > 1e-6) ++audit_.work_conservation_violations;
    }
  }
  for (Packet& packet : completed) {
    const LayeredGraph& lg = model_->graph_of(packet.commodity);
    const auto& edge = lg.edge(packet.edge);
    ++packet.hops;
    if (edge.kind == EdgeKind::kComputation) {
      ++packet.stage;
      packet.size = w_[model_->commodities[packet.commodity].chain][packet.stage];
    }
    packet.at = edge.to;
    arrive(std::move(packet), slot);
  }
}

double Dataplane::total_backlog() const {
  double total = 0.0;
  for (const auto& q : queues_) total += q.backlog();
  return total;
}

std::size_t Dataplane::packets_in_flight() const {
  std::size_t total = 0;
  for (const auto& q : queues_) total += q.size();
  return total;
}

CommodityMetrics commodity_metrics(const DeliveryLog& log, std::size_t commodity, std::uint64_t horizon) {
  CommodityMetrics metrics;
  metrics.delivered = log.delivered.at(commodity);
  metrics.throughput = horizon > 0 ? static_cast<double>(metrics.delivered) / static_cast<double>(horizon) : 0.0;
  const auto& delays = log.delays.at(commodity);
  if (!delays.empty()) {
    const double sum = std::accumulate(delays.begin(), delays.end(), 0.0);
    metrics.mean_delay = sum / static_cast<double>(delays.size());
  }
  return metrics;
}

double growth_slope(const std::vector<double>& series) {
  const std::size_t start = series.size() / 2;
  const std::size_t count = series.size() - start;
  if (count < 2) return 0.0;
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = start; i < series.size(); ++i) {
    mean_x += static_cast<double>(i);
    mean_y += series[i];
  }
  mean_x /= static_cast<double>(count);
  mean_y /= static_cast<double>(count);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = start; i < series.size(); ++i) {
    const double dx = static_cast<double>(i) - mean_x;
    sxy += dx * (series[i] - mean_y);
    sxx += dx * dx;
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace ucnc
