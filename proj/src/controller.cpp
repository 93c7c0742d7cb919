#include "ucnc/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace ucnc {

VirtualQueueState VirtualQueueState::zero(const Network& net) {
  return {std::vector<double>(net.link_count(), 0.0), std::vector<double>(net.node_count(), 0.0), 0};
}

double VirtualQueueState::total() const {
  return std::accumulate(link.begin(), link.end(), 0.0) + std::accumulate(node.begin(), node.end(), 0.0);
}

void validate_commodity(const Commodity& commodity, const Network& net, std::size_t chain_count) {
  const std::string label = "commodity '" + commodity.id + "'";
  if (commodity.source >= net.node_count()) throw ValidationError(label + ": source not in network");
  if (commodity.destinations.empty()) throw ValidationError(label + ": no destinations");
  std::set<NodeIndex> unique;
  for (NodeIndex d : commodity.destinations) {
    if (d >= net.node_count()) throw ValidationError(label + ": destination not in network");
    if (!unique.insert(d).second) throw ValidationError(label + ": duplicate destination");
  }
  if (commodity.chain >= chain_count) throw ValidationError(label + ": unknown chain");
  if (sgn(commodity.rate) < 0) throw ValidationError(label + ": negative rate");
  if (commodity.arrivals == ArrivalDistribution::kBernoulli && commodity.rate > 1) {
    throw ValidationError(label + ": Bernoulli arrivals need rate <= 1");
  }
}

std::vector<double> edge_costs(const VirtualQueueState& vq, const ScalingProfile& profile, const LayeredGraph& lg) {
  return weighted_edge_costs<double>(lg, profile, vq.link, vq.node);
}

VirtualArrivals VirtualArrivals::zero(const Network& net) {
  return {std::vector<double>(net.link_count(), 0.0), std::vector<double>(net.node_count(), 0.0)};
}

VirtualArrivals& VirtualArrivals::operator+=(const VirtualArrivals& other) {
  for (std::size_t i = 0; i < link.size(); ++i) link[i] += other.link[i];
  for (std::size_t i = 0; i < node.size(); ++i) node[i] += other.node[i];
  return *this;
}

VirtualArrivals virtual_arrivals(const LayeredGraph& lg, const Route& route, const ScalingProfile& profile,
                                 std::uint64_t count) {
  VirtualArrivals amounts = VirtualArrivals::zero(lg.network());
  if (count == 0) return amounts;
  const double n = static_cast<double>(count);
  for (EdgeId e : route.edges) {
    const auto& edge = lg.edge(e);
    if (edge.kind == EdgeKind::kTransmission) {
      amounts.link[lg.network().arc(edge.arc).link] += n * to_double(profile.w(edge.layer));
    } else {
      amounts.node[edge.tail] += n * to_double(profile.x_at(edge.layer, edge.tail));
    }
  }
  return amounts;
}

VirtualQueueState update_virtual_queues(const VirtualQueueState& vq, const VirtualArrivals& arrivals,
                                        const Network& net) {
  VirtualQueueState next = vq;
  for (LinkIndex e = 0; e < net.link_count(); ++e) {
    next.link[e] = std::max(0.0, vq.link[e] + arrivals.link[e] - to_double(net.link(e).capacity));
  }
  for (NodeIndex u = 0; u < net.node_count(); ++u) {
    next.node[u] = std::max(0.0, vq.node[u] + arrivals.node[u] - to_double(net.node(u).compute_capacity));
  }
  next.slot = vq.slot + 1;
  return next;
}

std::shared_ptr<const ServiceModel> make_service_model(Network net, std::vector<ServiceChain> chains,
                                                       std::vector<Commodity> commodities) {
  auto model = std::make_shared<ServiceModel>(ServiceModel{std::move(net), std::move(chains), std::move(commodities), {}, {}});
  for (const auto& chain : model->chains) {
    validate_chain(chain, model->net);
    model->graphs.emplace_back(model->net, chain);
    model->profiles.emplace_back(chain);
  }
  for (const auto& commodity : model->commodities) {
    validate_commodity(commodity, model->net, model->chains.size());
  }
  return model;
}

Controller::Controller(std::shared_ptr<const ServiceModel> model, ControllerOptions options)
    : model_(std::move(model)),
      options_(options),
      state_(VirtualQueueState::zero(model_->net)),
      pending_(VirtualArrivals::zero(model_->net)),
      frozen_costs_(model_->chains.size()) {}

const std::vector<double>& Controller::costs_for_chain(std::size_t chain) {
  auto& slot = frozen_costs_[chain];
  if (!slot) slot = edge_costs(state_, model_->profiles[chain], model_->graphs[chain]);
  return *slot;
}

Route Controller::select(std::size_t c) {
  const Commodity& commodity = model_->commodities.at(c);
  const LayeredGraph& lg = model_->graphs[commodity.chain];
  std::span<const double> costs = costs_for_chain(commodity.chain);
  switch (commodity.kind()) {
    case CastKind::kUnicast:
      return select_route_unicast<double>(lg, costs, commodity.source, commodity.destinations.front(), c);
    case CastKind::kAnycast:
      return select_route_anycast<double>(lg, costs, commodity.source, commodity.destinations, c);
    case CastKind::kMulticast:
      break;
  }
  const bool within_bound = commodity.destinations.size() <= kExactSteinerTerminalBound;
  const bool use_exact = options_.multicast == MulticastSolver::kExact ||
                         (options_.multicast == MulticastSolver::kAuto && within_bound);
  if (use_exact) return select_route_multicast<double>(lg, costs, commodity.source, commodity.destinations, c);

  Route route = select_route_approx<double>(lg, costs, commodity.source, commodity.destinations, c);
  if (options_.check_approximation && within_bound) {
    Route exact = select_route_multicast<double>(lg, costs, commodity.source, commodity.destinations, c);
    const double approx_cost = route_cost<double>(route, costs);
    const double exact_cost = route_cost<double>(exact, costs);
    ++approx_stats_.samples;
    if (exact_cost > 0) {
      const double ratio = approx_cost / exact_cost;
      approx_stats_.worst_ratio = std::max(approx_stats_.worst_ratio, ratio);
      if (ratio > options_.alpha + 1e-9) ++approx_stats_.above_alpha;
    }
  }
  return route;
}

void Controller::record(const Route& route, std::uint64_t count) {
  if (count == 0) return;
  pending_ += virtual_arrivals(model_->graph_of(route.commodity), route, model_->profile_of(route.commodity), count);
}

void Controller::end_slot() {
  state_ = update_virtual_queues(state_, pending_, model_->net);
  pending_ = VirtualArrivals::zero(model_->net);
  for (auto& costs : frozen_costs_) costs.reset();
}

ArrivalProcess::ArrivalProcess(std::uint64_t seed, std::size_t commodity_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(commodity_index), 0x5eedu};
  rng_.seed(seq);
}

std::uint64_t ArrivalProcess::sample(ArrivalDistribution distribution, double rate) {
  if (rate <= 0) return 0;
  if (distribution == ArrivalDistribution::kPoisson) {
    std::poisson_distribution<std::uint64_t> poisson(rate);
    return poisson(rng_);
  }
  const double whole = std::floor(rate);
  std::bernoulli_distribution coin(rate - whole);
  return static_cast<std::uint64_t>(whole) + (coin(rng_) ? 1 : 0);
}

}  // namespace ucnc
