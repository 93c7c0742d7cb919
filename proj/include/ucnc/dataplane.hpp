#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "ucnc/chaining.hpp"
#include "ucnc/controller.hpp"

namespace ucnc {

/// Raised when a packet cannot follow its stored route; indicates a routing
/// bug and aborts the run.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Discipline { kEnto, kFifo };

/// A route as carried by packets: the route plus its per-node children and
/// the destination copies it reaches.
struct ActiveRoute {
  Route route;
  std::map<LayeredNodeId, std::vector<EdgeId>> children;
  std::vector<LayeredNodeId> terminals;
};

struct Packet {
  std::size_t commodity = 0;
  std::shared_ptr<const ActiveRoute> route;
  LayeredNodeId at = 0;  // tail of the edge being served
  EdgeId edge = 0;
  std::size_t stage = 0;
  std::uint32_t hops = 0;
  double size = 1.0;       // w(stage)
  double remaining = 0.0;  // service units left on the current edge
  std::uint64_t arrival_slot = 0;
  std::uint64_t queue_arrival_slot = 0;
  std::uint64_t seq = 0;
  std::uint64_t group = 0;  // delivery group shared by all copies
};

/// Extended nearest-to-origin order: fewer hops first, then earlier network
/// arrival, then smaller sequence id.
std::strong_ordering ento_priority(const Packet& p, const Packet& q);
/// First-in-first-out order at one queue: earlier queue arrival, then
/// smaller sequence id.
std::strong_ordering fifo_priority(const Packet& p, const Packet& q);

struct DeliveryLog {
  std::vector<std::uint64_t> delivered;             // R per commodity
  std::vector<std::vector<std::uint32_t>> delays;   // delivery slot - arrival slot
  std::vector<std::uint64_t> admitted;
};

struct DataplaneOptions {
  Discipline discipline = Discipline::kEnto;
  /// Cross-checks every slot's service order against the priority function,
  /// work conservation and duplicate hop inheritance.
  bool audit = false;
};

struct AuditReport {
  std::uint64_t queue_slots_checked = 0;
  std::uint64_t order_violations = 0;
  std::uint64_t work_conservation_violations = 0;
  std::uint64_t duplications = 0;
  std::uint64_t inheritance_violations = 0;
  std::uint32_t max_hops_seen = 0;
};

/// Physical queues of one link (shared by both directions when undirected)
/// or one compute node.
class PhysicalQueue {
 public:
  explicit PhysicalQueue(Discipline discipline = Discipline::kEnto) : discipline_(discipline) {}

  void push(Packet packet);
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  double backlog() const { return backlog_; }
  const Packet& top() const { return heap_.front(); }
  Packet pop();
  std::vector<Packet> snapshot() const { return heap_; }

  /// Reduces the top packet's remaining service without reordering.
  void serve_top(double amount);

 private:
  struct Order {
    Discipline discipline;
    bool operator()(const Packet& a, const Packet& b) const;  // true if a after b
  };
  Discipline discipline_;
  std::vector<Packet> heap_;
  double backlog_ = 0.0;
};

/// Time-slotted physical network: packets follow their stored routes, each
/// link and compute node serves up to its capacity per slot in priority
/// order, computation advances the stage, branch nodes duplicate.
class Dataplane {
 public:
  Dataplane(std::shared_ptr<const ServiceModel> model, DataplaneOptions options = {});

  /// Places `count` fresh packets of `route.commodity` at the route's root.
  void admit(std::uint64_t count, const Route& route, std::uint64_t slot);
  /// Serves every queue for one slot and moves completed packets on.
  void step(std::uint64_t slot);

  const DeliveryLog& log() const { return log_; }
  const AuditReport& audit() const { return audit_; }

  std::size_t queue_count() const { return queues_.size(); }
  /// Queue index of link e is e; of node u is link_count + u.
  double queue_backlog(std::size_t q) const { return queues_.at(q).backlog(); }
  double total_backlog() const;
  std::size_t packets_in_flight() const;
  bool idle() const { return packets_in_flight() == 0; }

  /// Work units ever enqueued to / served by each queue.
  const std::vector<double>& injected_work() const { return injected_; }
  const std::vector<double>& served_work() const { return served_; }

 private:
  struct Group {
    std::size_t commodity;
    std::uint64_t arrival_slot;
    std::size_t outstanding;
  };

  std::size_t queue_of(EdgeId edge, const LayeredGraph& lg) const;
  void arrive(Packet packet, std::uint64_t slot);
  void enqueue(Packet packet, EdgeId edge, std::uint64_t slot);
  std::shared_ptr<const ActiveRoute> activate(const Route& route) const;

  std::shared_ptr<const ServiceModel> model_;
  DataplaneOptions options_;
  std::vector<PhysicalQueue> queues_;
  std::vector<double> capacity_;
  std::vector<std::vector<double>> w_;          // per chain, per layer
  std::vector<std::vector<double>> edge_work_;  // per chain, per layered edge
  std::vector<double> injected_;
  std::vector<double> served_;
  std::unordered_map<std::uint64_t, Group> groups_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_group_ = 0;
  DeliveryLog log_;
  AuditReport audit_;
};

struct CommodityMetrics {
  double throughput = 0.0;  // R(T) / T
  std::optional<double> mean_delay;
  std::uint64_t delivered = 0;
};

CommodityMetrics commodity_metrics(const DeliveryLog& log, std::size_t commodity, std::uint64_t horizon);

/// Least-squares slope of `series` over its second half.
double growth_slope(const std::vector<double>& series);

}  // namespace ucnc
