#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ucnc/chaining.hpp"
#include "ucnc/controller.hpp"
#include "ucnc/rational.hpp"

namespace ucnc {

class EnumerationLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumerationBounds {
  std::size_t max_physical_nodes = 14;
  std::size_t max_terminals = 3;
  std::size_t max_routes = 100000;
};

/// All service chain paths (unicast, anycast) or minimal Steiner
/// arborescences (multicast) of commodity `index` in its layered graph,
/// deduplicated and in generation order.
std::vector<Route> enumerate_routes(const ServiceModel& model, std::size_t index,
                                    const EnumerationBounds& bounds = {});
std::vector<Route> enumerate_routes(const LayeredGraph& lg, const Commodity& commodity, std::size_t index,
                                    const EnumerationBounds& bounds = {});

using RateVector = std::vector<Rational>;

struct WeightedRoute {
  Route route;
  Rational weight;
};

/// Per commodity, routes with their rates; rates sum to the commodity's rate.
struct FlowAssignment {
  std::vector<std::vector<WeightedRoute>> commodities;
};

enum class RouteSource {
  kAuto,               // enumeration when small, column generation otherwise
  kEnumerate,          // full enumeration; throws EnumerationLimitError
  kColumnGeneration,   // pricing by the exact route selectors
};

struct OracleOptions {
  RouteSource routes = RouteSource::kAuto;
  EnumerationBounds bounds;
  /// kAuto enumerates when all commodities together have at most this many
  /// routes.
  std::size_t auto_enumeration_limit = 2000;
};

struct ScalarRate {
  bool unbounded = false;
  Rational theta = 0;          // meaningful when bounded
  FlowAssignment assignment;   // rates at theta * direction (at 1 * direction when unbounded)
  std::size_t route_columns = 0;
  bool column_generation = false;
};

/// sup{theta : theta * direction is in the capacity region}, by an exact
/// rational LP over route rates with link and node capacity rows.
ScalarRate max_scalar_rate(const ServiceModel& model, const RateVector& direction, const OracleOptions& options = {});

struct Feasibility {
  bool feasible = false;
  std::optional<FlowAssignment> witness;
};

/// Decides whether `rates` lies in the capacity region; the witness meets
/// every rate exactly within all capacities.
Feasibility capacity_feasible(const ServiceModel& model, const RateVector& rates, const OracleOptions& options = {});

/// Independent exact recheck of a witness: route validity, rate sums and
/// capacity constraints. Returns the first violation.
std::optional<std::string> check_witness(const ServiceModel& model, const RateVector& rates,
                                         const FlowAssignment& witness);

/// Edge flows of one route at `rate`: w(i) * rate on transmission edges,
/// x_u(i) * rate on computation edges.
std::vector<Rational> route_edge_flow(const LayeredGraph& lg, const ScalingProfile& profile, const Route& route,
                                      const Rational& rate);

struct ConservationResidual {
  LayeredNodeId node = 0;
  Rational residual;  // inflow-side total minus outflow-side total, in input-flow units
};

struct ConservationReport {
  bool ok() const { return residuals.empty(); }
  std::vector<ConservationResidual> residuals;
};

/// Generalized conservation at every layered node outside `exempt`:
///   sum_in f + (xi_i / r_i) f_comp_in = sum_out f + (1 / r_{i+1}) f_comp_out
/// with host-specific r where declared.
ConservationReport verify_conservation(const LayeredGraph& lg, std::span<const Rational> flows,
                                       const std::set<LayeredNodeId>& exempt);

struct Decomposition {
  std::vector<WeightedRoute> routes;
  Rational micro_packets_per_packet = 1;  // z
};

inline constexpr long kMaxMicroPacketDenominator = 1'000'000;

/// Splits an edge flow into a convex combination of service chain routes
/// reproducing it exactly. Unicast flows are peeled in micro-packet units;
/// multicast flows are solved exactly over the arborescences inside the flow
/// support.
Decomposition decompose_flow(const LayeredGraph& lg, std::span<const Rational> flows, NodeIndex source,
                             std::span<const NodeIndex> destinations, const EnumerationBounds& bounds = {});

nlohmann::json assignment_to_json(const ServiceModel& model, const FlowAssignment& assignment);

}  // namespace ucnc
