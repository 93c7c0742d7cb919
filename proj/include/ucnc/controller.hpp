#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ucnc/chaining.hpp"
#include "ucnc/routing.hpp"
#include "ucnc/topology.hpp"

namespace ucnc {

/// One backlog per physical link and per node, charged with the full future
/// load of each admitted batch and drained at capacity.
struct VirtualQueueState {
  std::vector<double> link;
  std::vector<double> node;
  std::uint64_t slot = 0;

  static VirtualQueueState zero(const Network& net);
  double total() const;
};

enum class ArrivalDistribution { kPoisson, kBernoulli };

enum class CastKind { kUnicast, kMulticast, kAnycast };

struct Commodity {
  std::string id;
  NodeIndex source = 0;
  std::vector<NodeIndex> destinations;
  std::size_t chain = 0;  // index into the scenario's chain list
  Rational rate = 0;      // mean packets per slot
  ArrivalDistribution arrivals = ArrivalDistribution::kPoisson;
  bool anycast = false;

  CastKind kind() const {
    if (anycast) return CastKind::kAnycast;
    return destinations.size() > 1 ? CastKind::kMulticast : CastKind::kUnicast;
  }
};

void validate_commodity(const Commodity& commodity, const Network& net, std::size_t chain_count);

/// Layered edge costs w(i)*Q_uv for transmission and x_u(i)*Q_u for
/// computation.
std::vector<double> edge_costs(const VirtualQueueState& vq, const ScalingProfile& profile, const LayeredGraph& lg);

/// Per-link and per-node amounts a batch adds to the virtual queues.
struct VirtualArrivals {
  std::vector<double> link;
  std::vector<double> node;

  static VirtualArrivals zero(const Network& net);
  VirtualArrivals& operator+=(const VirtualArrivals& other);
};

/// A_uv = count * sum of w(i) over the route's transmission edges on (u,v)
/// (both directions for undirected links); A_u = count * sum of x_u(i) over
/// its computation edges at u.
VirtualArrivals virtual_arrivals(const LayeredGraph& lg, const Route& route, const ScalingProfile& profile,
                                 std::uint64_t count);

/// Q(t+1) = max(0, Q(t) + A - mu) per link and node.
VirtualQueueState update_virtual_queues(const VirtualQueueState& vq, const VirtualArrivals& arrivals,
                                        const Network& net);

/// Validated network, chains and commodities with the per-chain layered
/// graphs and scaling profiles derived from them. Immutable and shared by the
/// controller and the dataplane of a run.
struct ServiceModel {
  Network net;
  std::vector<ServiceChain> chains;
  std::vector<Commodity> commodities;
  std::vector<LayeredGraph> graphs;
  std::vector<ScalingProfile> profiles;

  const LayeredGraph& graph_of(std::size_t commodity) const { return graphs.at(commodities.at(commodity).chain); }
  const ScalingProfile& profile_of(std::size_t commodity) const {
    return profiles.at(commodities.at(commodity).chain);
  }
};

std::shared_ptr<const ServiceModel> make_service_model(Network net, std::vector<ServiceChain> chains,
                                                       std::vector<Commodity> commodities);

enum class MulticastSolver { kExact, kApprox, kAuto };

struct ControllerOptions {
  MulticastSolver multicast = MulticastSolver::kAuto;  // kAuto: exact up to the terminal bound
  /// Approximation factor declared for the approximate solver. When
  /// `check_approximation` is set, the exact optimum is also computed and the
  /// worst observed ratio is tracked.
  double alpha = 2.0;
  bool check_approximation = false;
};

struct ApproximationStats {
  std::uint64_t samples = 0;
  double worst_ratio = 1.0;
  std::uint64_t above_alpha = 0;
};

/// UCNC route selection over virtual queues. Within a slot costs are frozen
/// at the slot's starting state; arrivals recorded during the slot are
/// applied by end_slot().
class Controller {
 public:
  explicit Controller(std::shared_ptr<const ServiceModel> model, ControllerOptions options = {});

  const ServiceModel& model() const { return *model_; }
  const VirtualQueueState& state() const { return state_; }

  /// Minimum-cost route for commodity c under the frozen slot costs.
  Route select(std::size_t commodity);
  /// Charges `count` packets routed on `route` to the pending arrivals.
  void record(const Route& route, std::uint64_t count);
  /// Applies the recursion and advances to the next slot.
  void end_slot();

  const ApproximationStats& approximation_stats() const { return approx_stats_; }

 private:
  const std::vector<double>& costs_for_chain(std::size_t chain);

  std::shared_ptr<const ServiceModel> model_;
  ControllerOptions options_;
  VirtualQueueState state_;
  VirtualArrivals pending_;
  std::vector<std::optional<std::vector<double>>> frozen_costs_;
  ApproximationStats approx_stats_;
};

/// Independent seeded arrival stream per commodity.
class ArrivalProcess {
 public:
  ArrivalProcess(std::uint64_t seed, std::size_t commodity_index);
  std::uint64_t sample(ArrivalDistribution distribution, double rate);

 private:
  std::mt19937_64 rng_;
};

}  // namespace ucnc
