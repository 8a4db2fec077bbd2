#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "leoisl/topology.hpp"

namespace leoisl {

struct Path {
  std::vector<int> nodes;
  int hop_count = 0;
  double total_distance_km = 0.0;
  double total_propagation_delay_s = 0.0;
  /// +inf for the empty (src == dst) path.
  double bottleneck_capacity_bps = 0.0;
  std::vector<double> hop_capacities_bps;
};

/// Adjacency view over a snapshot. Ground nodes may start or end a path but
/// never relay traffic.
class Graph {
 public:
  struct Arc {
    int to;
    int edge;
  };

  explicit Graph(const TopologySnapshot& snapshot, bool isl_only = false);

  const TopologySnapshot& snapshot() const { return *snapshot_; }
  int num_nodes() const { return static_cast<int>(adjacency_.size()); }
  const std::vector<Arc>& arcs(int node) const { return adjacency_[static_cast<std::size_t>(node)]; }
  bool can_relay(int node) const;

  Path make_path(const std::vector<int>& nodes) const;

 private:
  const TopologySnapshot* snapshot_;
  std::vector<std::vector<Arc>> adjacency_;
};

enum class RouteMetric { distance, hops };

/// Minimum total distance; ties by fewer hops, then the lexicographically
/// smallest node sequence. nullopt when dst is unreachable.
std::optional<Path> shortest_distance_path(const Graph& graph, int src, int dst);
std::optional<Path> shortest_distance_path(const TopologySnapshot& snapshot, int src, int dst);

/// Minimum edge count; ties by smaller distance, then lexicographic sequence.
std::optional<Path> min_hop_path(const Graph& graph, int src, int dst);
std::optional<Path> min_hop_path(const TopologySnapshot& snapshot, int src, int dst);

std::optional<Path> find_path(const Graph& graph, int src, int dst, RouteMetric metric);

/// Hop counts from src to every node (-1 when unreachable).
std::vector<int> hop_counts_from(const Graph& graph, int src);

// ---------------------------------------------------------------------------
// Path-structure statistics

struct HopStatsRow {
  int pair_id = 0;
  double epoch_s = 0.0;
  int min_hops = 0;
  int max_hops = 0;
  double mean_hops = 0.0;
  int spread = 0;
  int associations = 0;  // (start, end) satellite combinations that were reachable
};

struct HopStats {
  std::vector<HopStatsRow> rows;
  int skipped_samples = 0;
};

/// For every pair and epoch, minimum-hop ISL counts over all (visible start
/// satellite, visible end satellite) associations.
HopStats ground_pair_hop_stats(const ConstellationConfig& config,
                               std::span<const std::pair<GroundNode, GroundNode>> pairs,
                               std::span<const double> epochs, const TopologySettings& settings);

/// pair_id,epoch_s,min_hops,max_hops,mean_hops,spread
std::string hop_stats_to_csv(const HopStats& stats);

struct SdpMhpResult {
  double fraction = 1.0;
  int matched = 0;
  int sampled = 0;
  int disconnected = 0;
};

/// Fraction of node pairs whose shortest-distance path has the minimum hop count.
SdpMhpResult sdp_mhp_fraction(const Graph& graph, std::span<const std::pair<int, int>> pairs);

/// Samples `sample_pairs` distinct satellite pairs per epoch.
SdpMhpResult sdp_mhp_fraction(const ConstellationConfig& config, const TopologySettings& settings,
                              int sample_pairs, std::span<const double> epochs,
                              std::uint64_t rng_seed);

}  // namespace leoisl
