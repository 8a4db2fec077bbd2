#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "leoisl/bandwidth.hpp"
#include "leoisl/link_budget.hpp"
#include "leoisl/orbital.hpp"
#include "leoisl/topology.hpp"
#include "leoisl/waterfill.hpp"

/// In-flight-connectivity content delivery over the satellite network.
namespace leoisl::ifc {

enum class PlanMode { optimized, greedy, equal_bandwidth, fully_connected };

std::string_view to_string(PlanMode mode);
/// Accepts optimized | greedy | equal | full (and the enum names).
PlanMode plan_mode_from_string(std::string_view name);

struct IfcSettings {
  double cache_fraction = 0.1;
  double hit_probability = 0.5;
  double request_probability = 1.0;
  int packet_bits = 1080;
  std::array<std::pair<int, int>, 4> class_ranges{{{50, 100}, {500, 1000}, {1000, 3000}, {10, 1000}}};
  DelayModel delay_model = DelayModel::cut_through;
  /// Cached requests may also pull from ground stations, which hold every file.
  bool cached_gs_fallback = true;
  int local_search_max_iterations = 200;
  int exhaustive_candidate_limit = 12;
  int sweep_max_isls = 8;
  std::vector<double> epochs_s{0.0};

  void validate() const;
  bool operator==(const IfcSettings&) const = default;
};

struct FileRequest {
  int request_id = 0;
  int aircraft = 0;  // index into the slot's aircraft list
  int file_class = 0;
  int num_packets = 0;
  int packet_bits = 1080;
  bool cached = false;
  std::vector<int> cache_holders;  // satellite indices
  std::vector<int> source_gs;      // ground station indices
  double bits() const { return static_cast<double>(num_packets) * packet_bits; }
};

/// Per-slot geometry and link rates needed by the planners. Satellites keep
/// their snapshot indices; ground stations and aircraft are numbered in the
/// order they appear in the snapshot.
class SlotNetwork {
 public:
  struct Link {
    int sat;
    double distance_km;
    double capacity_bps;  // full band
  };
  struct Peer {
    int sat;
    double distance_km;
  };

  /// `snapshot` must carry the candidate ISL graph plus ground links.
  SlotNetwork(const TopologySnapshot& snapshot, const LinkBudgetSet& links);

  int num_satellites() const { return num_sats_; }
  int num_ground_stations() const { return static_cast<int>(gs_links_.size()); }
  int num_aircraft() const { return static_cast<int>(air_links_.size()); }
  double epoch_s() const { return epoch_s_; }

  const std::vector<Peer>& isl_peers(int sat) const { return peers_[static_cast<std::size_t>(sat)]; }
  /// Distance of the ISL a-b, or a negative value when the pair is not linkable.
  double isl_distance(int a, int b) const;
  const std::vector<Link>& aircraft_links(int aircraft) const {
    return air_links_[static_cast<std::size_t>(aircraft)];
  }
  const std::vector<Link>& gs_links(int gs) const { return gs_links_[static_cast<std::size_t>(gs)]; }
  const LinkBudgetSet& link_params() const { return links_; }
  double isl_rate_bps() const { return links_.isl_laser.lisl_fixed_rate_bps; }

 private:
  double epoch_s_ = 0.0;
  int num_sats_ = 0;
  LinkBudgetSet links_;
  std::vector<std::vector<Peer>> peers_;
  std::vector<std::vector<Link>> air_links_;
  std::vector<std::vector<Link>> gs_links_;
};

/// Unlimited-degree ISL candidates within range plus ground links at epoch.
SlotNetwork build_slot_network(const ConstellationConfig& config,
                               std::span<const GroundNode> ground_stations,
                               std::span<const GroundNode> aircraft, const LinkBudgetSet& links,
                               const TopologySettings& topology, double epoch_s);

enum class SourceKind { local_cache, cache_holder, ground_station };
std::string_view to_string(SourceKind kind);

struct StreamPlan {
  SourceKind kind = SourceKind::local_cache;
  int source_sat = -1;  // holder, entry satellite, or the serving satellite itself
  int gs = -1;
  bool via_isl = false;
  double prop_s = 0.0;
  double rate_bps = 0.0;
  double ratio = 0.0;
  double bandwidth_share = 0.0;  // ground-station streams only
};

struct FilePlan {
  int request_id = 0;
  int aircraft = 0;
  bool cached = false;
  bool delivered = false;
  int serving_sat = -1;
  std::vector<StreamPlan> streams;
  double delay_s = 0.0;
};

struct DeliveryPlan {
  std::vector<FilePlan> files;
  std::vector<std::pair<int, int>> activated_isls;  // (sat, sat), a < b
  double total_delay_s = 0.0;
  double average_delay_s = 0.0;  // over delivered files, 0 when none
  int delivered = 0;
  int undelivered = 0;

  int max_isl_degree() const;
  /// Summed bandwidth share per ground station.
  std::vector<double> gs_share_totals(int num_ground_stations) const;
};

/// Single-request cached plan: serving satellite plus at most max_isls
/// cache-holder ISL peers. Optimised exhaustively while every serving
/// candidate has at most `exhaustive_candidate_limit` holder peers, otherwise
/// by greedy seeding and pairwise-swap local search.
FilePlan plan_cached(const FileRequest& request, const SlotNetwork& network, int max_isls,
                     PlanMode mode, const IfcSettings& settings = {});

/// Joint plan for requests sharing the slot: association, ISL activation under
/// the per-satellite degree limit, download ratios, and feeder shares.
DeliveryPlan plan_requests(std::span<const FileRequest> requests, const SlotNetwork& network,
                           int max_isls, PlanMode mode, const IfcSettings& settings = {});

/// plan_requests restricted to non-cached requests (throws otherwise).
DeliveryPlan plan_non_cached(std::span<const FileRequest> requests, const SlotNetwork& network,
                             int max_isls, PlanMode mode, const IfcSettings& settings = {});

/// Every mode's plan for one slot. Index k of the per-k vectors is the ISL
/// limit k, for k = 0..chain_length. The optimized plans are built as a chain
/// in k, each step warm-started from the previous one, so the optimized
/// objective is non-increasing in k, and the chain is re-run until the
/// unconstrained plan is no worse than its last element.
struct SlotSolution {
  std::vector<DeliveryPlan> optimized;
  std::vector<DeliveryPlan> greedy;
  std::vector<DeliveryPlan> equal_bandwidth;
  DeliveryPlan fully_connected;
  int chain_length = 0;

  const DeliveryPlan& plan(int max_isls, PlanMode mode) const;
};

/// Chain length is max(max_isls, settings.sweep_max_isls).
SlotSolution solve_slot(std::span<const FileRequest> requests, const SlotNetwork& network,
                        int max_isls, const IfcSettings& settings = {});

/// Requests for one slot; deterministic in (seed, epoch_index).
std::vector<FileRequest> generate_requests(const SlotNetwork& network, const IfcSettings& settings,
                                           std::uint64_t seed, int epoch_index);

struct SlotInputs {
  ConstellationConfig constellation;
  std::vector<GroundNode> ground_stations;
  std::vector<GroundNode> aircraft;
  LinkBudgetSet links;
  TopologySettings topology;
  IfcSettings ifc;
};

DeliveryPlan run_slot(const SlotInputs& inputs, double epoch_s, int epoch_index, int max_isls,
                      PlanMode mode, std::uint64_t rng_seed);

struct SweepRow {
  int max_isls = 0;
  PlanMode mode = PlanMode::optimized;
  std::uint64_t seed = 0;
  double epoch_s = 0.0;
  double avg_delay_s = 0.0;
  int delivered = 0;
  int undelivered = 0;
};

/// One row per (max_isls, mode, seed, epoch), sorted in that order.
std::vector<SweepRow> sweep_max_isls(const SlotInputs& inputs, std::span<const int> isls_range,
                                     std::span<const PlanMode> modes,
                                     std::span<const double> epochs,
                                     std::span<const std::uint64_t> seeds);

/// max_isls,mode,seed,epoch_s,avg_delay_s,delivered,undelivered
std::string sweep_to_csv(std::span<const SweepRow> rows);

/// Mean avg_delay per (max_isls, mode) over seeds and epochs.
struct SweepSummary {
  int max_isls;
  PlanMode mode;
  double mean_avg_delay_s;
};
std::vector<SweepSummary> summarize(std::span<const SweepRow> rows);

}  // namespace leoisl::ifc
