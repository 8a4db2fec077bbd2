#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leoisl/link_budget.hpp"
#include "leoisl/orbital.hpp"

namespace leoisl {

enum class NodeKind { satellite, ground_station, aircraft };

struct SnapshotNode {
  std::string id;
  NodeKind kind = NodeKind::satellite;
  Vec3 position_km = Vec3::Zero();
  int plane = -1;  // satellites only
  int slot = -1;
};

/// Undirected edge, stored with a < b.
struct Edge {
  int a = 0;
  int b = 0;
  LinkClass link_class = LinkClass::isl_laser;
  double distance_km = 0.0;
  double capacity_bps = 0.0;
  double delay_s = 0.0;
};

enum class TopologyMode { grid, dynamic };
enum class LinkPolicy { nearest_first, intra_orbit_preferred };

std::string_view to_string(TopologyMode mode);
std::string_view to_string(LinkPolicy policy);
TopologyMode topology_mode_from_string(std::string_view name);
LinkPolicy link_policy_from_string(std::string_view name);

struct TopologySettings {
  TopologyMode mode = TopologyMode::dynamic;
  int max_isls = 4;
  double max_range_km = 5000.0;
  double grazing_altitude_km = 80.0;
  double elevation_mask_deg = 10.0;
  LinkPolicy policy = LinkPolicy::nearest_first;

  void validate() const;
  bool operator==(const TopologySettings&) const = default;
};

inline constexpr int kUnlimitedIsls = 1 << 30;

/// Time-stamped graph of satellites (indices [0, num_satellites)) followed by
/// ground nodes. Immutable once built.
class TopologySnapshot {
 public:
  TopologySnapshot() = default;
  TopologySnapshot(double epoch_s, std::vector<SnapshotNode> nodes, std::vector<Edge> edges,
                   int max_isl_degree);

  double epoch_s() const { return epoch_s_; }
  const std::vector<SnapshotNode>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int max_isl_degree() const { return max_isl_degree_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_satellites() const { return num_satellites_; }

  std::optional<int> find_node(std::string_view id) const;
  /// Number of isl_laser edges incident to node.
  int isl_degree(int node) const;
  std::size_t isl_edge_count() const;

 private:
  double epoch_s_ = 0.0;
  std::vector<SnapshotNode> nodes_;
  std::vector<Edge> edges_;
  int max_isl_degree_ = 0;
  int num_satellites_ = 0;
};

std::vector<SnapshotNode> satellite_nodes(std::span<const SatelliteState> states);

/// +Grid: in-plane predecessor/successor and same-slot satellites in adjacent
/// planes. Edges without line of sight are dropped.
TopologySnapshot build_grid_topology(std::span<const SatelliteState> states,
                                     const ConstellationConfig& config, double epoch_s = 0.0,
                                     double grazing_altitude_km = 80.0,
                                     const LinkBudgetParams& isl = LinkBudgetParams::defaults(
                                         LinkClass::isl_laser));

/// Degree-constrained greedy assignment over visible pairs within range.
/// Candidates are visited in a fixed total order (policy key, distance, id
/// pair); in round r = 1..max_isls an edge is admitted when both endpoints have
/// fewer than r links. The edge set for k is therefore a subset of the one for
/// k + 1.
TopologySnapshot build_dynamic_topology(std::span<const SatelliteState> states, int max_isls,
                                        double max_range_km, LinkPolicy policy,
                                        double epoch_s = 0.0, double grazing_altitude_km = 80.0,
                                        const LinkBudgetParams& isl = LinkBudgetParams::defaults(
                                            LinkClass::isl_laser));

/// Adds ground_to_sat (GS-satellite), sat_to_air (aircraft-satellite) and
/// ground_to_air (GS-aircraft) edges above the elevation mask.
TopologySnapshot attach_ground_links(const TopologySnapshot& snapshot,
                                     std::span<const GroundNode> ground_nodes,
                                     const LinkBudgetSet& link_params,
                                     double elevation_mask_deg = 10.0);

/// Satellite graph for one epoch according to settings (ground links not attached).
TopologySnapshot build_satellite_topology(const ConstellationConfig& config,
                                          const TopologySettings& settings, double epoch_s,
                                          const LinkBudgetParams& isl = LinkBudgetParams::defaults(
                                              LinkClass::isl_laser));

/// epoch_s,node_a,node_b,link_class,distance_km,capacity_bps,delay_s
std::string edges_to_csv(const TopologySnapshot& snapshot, bool header = true);

}  // namespace leoisl
