#include <algorithm>
#include <numeric>
#include <random>
#include <map>
#include <cmath>
#include <stdexcept>
#include <string>

#include "leoisl/ifc.hpp"

namespace leoisl::ifc {

std::string_view to_string(PlanMode mode) {
  switch (mode) {
    case PlanMode::optimized: return "optimized";
    case PlanMode::greedy: return "greedy";
    case PlanMode::equal_bandwidth: return "equal";
    case PlanMode::fully_connected: return "full";
  }
  return "optimized";
}

PlanMode plan_mode_from_string(std::string_view name) {
  if (name == "optimized") return PlanMode::optimized;
  if (name == "greedy") return PlanMode::greedy;
  if (name == "equal" || name == "equal_bandwidth") return PlanMode::equal_bandwidth;
  if (name == "full" || name == "fully_connected") return PlanMode::fully_connected;
  throw std::invalid_argument("unknown plan mode '" + std::string(name) + "'");
}

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::local_cache: return "local_cache";
    case SourceKind::cache_holder: return "cache_holder";
    case SourceKind::ground_station: return "ground_station";
  }
  return "local_cache";
}

void IfcSettings::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
  };
  if (!(cache_fraction >= 0.0 && cache_fraction <= 1.0)) fail("cache_fraction", "must be in [0, 1]");
  if (!(hit_probability >= 0.0 && hit_probability <= 1.0)) fail("hit_probability", "must be in [0, 1]");
  if (!(request_probability >= 0.0 && request_probability <= 1.0))
    fail("request_probability", "must be in [0, 1]");
  if (packet_bits <= 0) fail("packet_bits", "must be positive");
  for (const auto& [lo, hi] : class_ranges) {
    if (lo < 0 || hi < lo) fail("class_ranges", "each range needs 0 <= low <= high");
  }
  if (local_search_max_iterations < 0) fail("local_search_max_iterations", "must be >= 0");
  if (exhaustive_candidate_limit < 0) fail("exhaustive_candidate_limit", "must be >= 0");
  if (sweep_max_isls < 0) fail("sweep_max_isls", "must be >= 0");
  if (epochs_s.empty()) fail("epochs_s", "needs at least one epoch");
  for (double t : epochs_s) {
    if (!std::isfinite(t)) fail("epochs_s", "must be finite");
  }
}

SlotNetwork::SlotNetwork(const TopologySnapshot& snapshot, const LinkBudgetSet& links)
    : epoch_s_(snapshot.epoch_s()), num_sats_(snapshot.num_satellites()), links_(links) {
  const auto& nodes = snapshot.nodes();
  std::vector<int> ground_index(nodes.size(), -1);
  for (std::size_t i = static_cast<std::size_t>(num_sats_); i < nodes.size(); ++i) {
    if (nodes[i].kind == NodeKind::aircraft) {
      ground_index[i] = static_cast<int>(air_links_.size());
      air_links_.emplace_back();
    } else {
      ground_index[i] = static_cast<int>(gs_links_.size());
      gs_links_.emplace_back();
    }
  }
  peers_.resize(static_cast<std::size_t>(num_sats_));
  for (const auto& e : snapshot.edges()) {
    switch (e.link_class) {
      case LinkClass::isl_laser:
        peers_[static_cast<std::size_t>(e.a)].push_back({e.b, e.distance_km});
        peers_[static_cast<std::size_t>(e.b)].push_back({e.a, e.distance_km});
        break;
      case LinkClass::sat_to_air:
        air_links_[static_cast<std::size_t>(ground_index[static_cast<std::size_t>(e.b)])].push_back(
            {e.a, e.distance_km, e.capacity_bps});
        break;
      case LinkClass::ground_to_sat:
        gs_links_[static_cast<std::size_t>(ground_index[static_cast<std::size_t>(e.b)])].push_back(
            {e.a, e.distance_km, e.capacity_bps});
        break;
      case LinkClass::ground_to_air:
        break;
    }
  }
  for (auto& p : peers_) {
    std::sort(p.begin(), p.end(), [](const Peer& x, const Peer& y) { return x.sat < y.sat; });
  }
  auto by_sat = [](const Link& x, const Link& y) { return x.sat < y.sat; };
  for (auto& l : air_links_) std::sort(l.begin(), l.end(), by_sat);
  for (auto& l : gs_links_) std::sort(l.begin(), l.end(), by_sat);
}

double SlotNetwork::isl_distance(int a, int b) const {
  const auto& p = peers_[static_cast<std::size_t>(a)];
  const auto it = std::lower_bound(p.begin(), p.end(), b,
                                   [](const Peer& x, int sat) { return x.sat < sat; });
  return (it != p.end() && it->sat == b) ? it->distance_km : -1.0;
}

SlotNetwork build_slot_network(const ConstellationConfig& config,
                               std::span<const GroundNode> ground_stations,
                               std::span<const GroundNode> aircraft, const LinkBudgetSet& links,
                               const TopologySettings& topology, double epoch_s) {
  config.validate();
  topology.validate();
  const auto states = propagate(config, epoch_s);
  const auto sats = build_dynamic_topology(states, kUnlimitedIsls, topology.max_range_km,
                                           topology.policy, epoch_s, topology.grazing_altitude_km,
                                           links.isl_laser);
  std::vector<GroundNode> ground(ground_stations.begin(), ground_stations.end());
  for (std::size_t i = 0; i < ground.size(); ++i) ground[i].kind = GroundKind::ground_station;
  for (const auto& a : aircraft) {
    auto copy = a;
    copy.kind = GroundKind::aircraft;
    ground.push_back(copy);
  }
  return SlotNetwork(attach_ground_links(sats, ground, links, topology.elevation_mask_deg), links);
}

std::vector<FileRequest> generate_requests(const SlotNetwork& network, const IfcSettings& settings,
                                           std::uint64_t seed, int epoch_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch_index)};
  std::mt19937_64 rng(seq);
  const int n_sats = network.num_satellites();

  // Each class is cached on its own random subset of satellites.
  const int per_class =
      settings.cache_fraction > 0.0
          ? std::max(1, static_cast<int>(std::lround(settings.cache_fraction * n_sats)))
          : 0;
  std::array<std::vector<int>, 4> placement;
  for (auto& holders : placement) {
    std::vector<int> all(static_cast<std::size_t>(n_sats));
    std::iota(all.begin(), all.end(), 0);
    const int take = std::min(per_class, n_sats);
    for (int i = 0; i < take; ++i) {
      std::uniform_int_distribution<int> pick(i, n_sats - 1);
      std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rng))]);
    }
    holders.assign(all.begin(), all.begin() + take);
    std::sort(holders.begin(), holders.end());
  }

  std::vector<int> all_gs(static_cast<std::size_t>(network.num_ground_stations()));
  std::iota(all_gs.begin(), all_gs.end(), 0);

  std::vector<FileRequest> out;
  std::bernoulli_distribution wants(settings.request_probability);
  std::bernoulli_distribution hit(settings.hit_probability);
  std::uniform_int_distribution<int> cls_pick(0, 3);
  for (int a = 0; a < network.num_aircraft(); ++a) {
    const bool request = wants(rng);
    const int cls = cls_pick(rng);
    const auto [lo, hi] = settings.class_ranges[static_cast<std::size_t>(cls)];
    std::uniform_int_distribution<int> size_pick(lo, hi);
    const int packets = size_pick(rng);
    const bool cached = hit(rng);
    if (!request) continue;
    FileRequest r;
    r.request_id = static_cast<int>(out.size());
    r.aircraft = a;
    r.file_class = cls;
    r.num_packets = packets;
    r.packet_bits = settings.packet_bits;
    r.cached = cached && !placement[static_cast<std::size_t>(cls)].empty();
    if (r.cached) r.cache_holders = placement[static_cast<std::size_t>(cls)];
    if (!r.cached || settings.cached_gs_fallback) r.source_gs = all_gs;
    out.push_back(std::move(r));
  }
  return out;
}

int DeliveryPlan::max_isl_degree() const {
  std::map<int, int> degree;
  int best = 0;
  for (const auto& [a, b] : activated_isls) {
    best = std::max({best, ++degree[a], ++degree[b]});
  }
  return best;
}

std::vector<double> DeliveryPlan::gs_share_totals(int num_ground_stations) const {
  std::vector<double> totals(static_cast<std::size_t>(num_ground_stations), 0.0);
  for (const auto& f : files) {
    for (const auto& s : f.streams) {
      if (s.kind == SourceKind::ground_station) totals[static_cast<std::size_t>(s.gs)] += s.bandwidth_share;
    }
  }
  return totals;
}

}  // namespace leoisl::ifc
