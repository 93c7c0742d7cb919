#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ucnc/controller.hpp"
#include "ucnc/dataplane.hpp"
#include "ucnc/topology.hpp"

namespace ucnc {

enum class Policy { kUcncEnto, kUcncFifo, kNearestToSource, kNearestToDestination, kMulticastAsUnicast };

std::string policy_name(Policy policy);
Policy parse_policy(const std::string& name);  // throws std::invalid_argument
const std::vector<Policy>& all_policies();

struct Scenario {
  std::string name;
  Network net{std::vector<Node>{}, std::vector<Link>{}};
  std::vector<ServiceChain> chains;
  std::vector<Commodity> commodities;  // rates at multiplier 1
  Policy policy = Policy::kUcncEnto;
  std::uint64_t horizon = 100000;
  std::vector<std::uint64_t> seeds{1};
  std::vector<double> lambda_grid{1.0};
  MulticastSolver multicast = MulticastSolver::kAuto;
};

/// Throws ValidationError for an empty grid or seed list, an unsorted grid,
/// or invalid chains and commodities.
void validate_scenario(const Scenario& scenario);

/// Parses a full config document: network, `chains`, `commodities` and an
/// optional `scenario` section.
Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario(const std::string& text);
nlohmann::json scenario_to_json(const Scenario& scenario);

std::vector<std::string> preset_names();
/// Built-in experiments on the Abilene network. `seed` only affects
/// `mixed-18`, whose chains, hosts and endpoints are drawn at random.
Scenario preset(const std::string& name, std::uint64_t seed = 1);
Scenario mixed_cast_preset(std::uint64_t seed);

/// One unicast commodity per destination with the same source, chain and
/// rate. Throws std::invalid_argument for a single-destination commodity.
std::vector<Commodity> multicast_as_unicast(const Commodity& commodity);
/// Applies multicast_as_unicast to every multicast commodity.
Scenario split_multicast(const Scenario& scenario);

/// Fixed heuristic route: shortest-hop path to the compute node nearest to
/// the source (or the destinations), every function processed there, then
/// shortest-hop delivery. Throws ValidationError when no node hosts every
/// function of the chain.
Route nearest_route(const ServiceModel& model, std::size_t commodity, bool toward_destination);
NodeIndex nearest_compute_node(const ServiceModel& model, std::size_t commodity, bool toward_destination);

struct CsvRow {
  std::string policy;
  double lambda_multiplier = 0.0;
  std::uint64_t seed = 0;
  std::string commodity_id;
  double throughput = 0.0;
  std::optional<double> mean_delay;
  std::uint64_t delivered = 0;
  double vq_sum_final = 0.0;
  double max_backlog = 0.0;
  double growth_slope = 0.0;
};

struct RunOptions {
  bool audit = false;
  bool check_approximation = false;
  /// Records every queue's backlog each slot (queue index as in Dataplane).
  bool trace_queues = false;
};

struct RunResult {
  std::vector<CsvRow> rows;
  std::vector<double> backlog_trace;                 // total physical backlog after each slot
  std::vector<std::vector<double>> queue_traces;     // per queue, when requested
  double max_backlog = 0.0;                          // largest single-queue backlog seen
  double growth_slope = 0.0;
  AuditReport audit;
  ApproximationStats approximation;
  VirtualQueueState final_virtual_queues;
  DeliveryLog log;
};

/// Simulates `scenario.policy` for `scenario.horizon` slots with all rates
/// scaled by `lambda_multiplier`. Slot order: arrivals and route selection,
/// admission, service, advancement, virtual queue update.
RunResult run(const Scenario& scenario, double lambda_multiplier, std::uint64_t seed, const RunOptions& options = {});

/// Every (policy, lambda, seed) combination, run concurrently; rows sorted by
/// policy name, lambda, seed, then commodity order.
std::vector<CsvRow> sweep(const Scenario& scenario, const std::vector<Policy>& policies,
                          const std::vector<double>& lambda_grid, const std::vector<std::uint64_t>& seeds,
                          unsigned threads = 0);

std::string csv_header();
std::string to_csv(const std::vector<CsvRow>& rows);
std::vector<CsvRow> parse_csv(const std::string& text);

/// Whitespace-separated blocks for gnuplot: one block per policy, columns
/// lambda, mean throughput and mean delay averaged over seeds and commodities.
std::string gnuplot_columns(const std::vector<CsvRow>& rows);

}  // namespace ucnc
