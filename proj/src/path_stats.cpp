#include <random>
#include <stdexcept>

#include "leoisl/csv.hpp"
#include "leoisl/routing.hpp"

namespace leoisl {
namespace {

std::vector<int> visible_satellites(const TopologySnapshot& snap, const Vec3& ground,
                                    double mask_deg) {
  std::vector<int> out;
  for (int s = 0; s < snap.num_satellites(); ++s) {
    if (visible_from_ground(ground, snap.nodes()[static_cast<std::size_t>(s)].position_km, mask_deg)) {
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

HopStats ground_pair_hop_stats(const ConstellationConfig& config,
                               std::span<const std::pair<GroundNode, GroundNode>> pairs,
                               std::span<const double> epochs, const TopologySettings& settings) {
  if (pairs.empty() || epochs.empty()) {
    throw std::invalid_argument("ground_pair_hop_stats: pairs and epochs must be non-empty");
  }
  HopStats stats;
  for (double epoch : epochs) {
    const auto snap = build_satellite_topology(config, settings, epoch);
    const Graph graph(snap, true);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto& [a, b] = pairs[p];
      const auto va = visible_satellites(snap, ground_position(a, epoch), settings.elevation_mask_deg);
      const auto vb = visible_satellites(snap, ground_position(b, epoch), settings.elevation_mask_deg);
      HopStatsRow row;
      row.pair_id = static_cast<int>(p);
      row.epoch_s = epoch;
      row.min_hops = std::numeric_limits<int>::max();
      row.max_hops = -1;
      long total = 0;
      for (int s : va) {
        const auto hops = hop_counts_from(graph, s);
        for (int t : vb) {
          const int h = hops[static_cast<std::size_t>(t)];
          if (h < 0) continue;
          row.min_hops = std::min(row.min_hops, h);
          row.max_hops = std::max(row.max_hops, h);
          total += h;
          ++row.associations;
        }
      }
      if (row.associations == 0) {
        ++stats.skipped_samples;
        continue;
      }
      row.mean_hops = static_cast<double>(total) / row.associations;
      row.spread = row.max_hops - row.min_hops;
      stats.rows.push_back(row);
    }
  }
  return stats;
}

std::string hop_stats_to_csv(const HopStats& stats) {
  std::string out = "pair_id,epoch_s,min_hops,max_hops,mean_hops,spread\n";
  for (const auto& r : stats.rows) {
    out += csv::row({std::to_string(r.pair_id), csv::number(r.epoch_s), std::to_string(r.min_hops),
                     std::to_string(r.max_hops), csv::number(r.mean_hops),
                     std::to_string(r.spread)});
  }
  return out;
}

SdpMhpResult sdp_mhp_fraction(const Graph& graph, std::span<const std::pair<int, int>> pairs) {
  SdpMhpResult result;
  for (auto [s, d] : pairs) {
    const auto sdp = shortest_distance_path(graph, s, d);
    if (!sdp) {
      ++result.disconnected;
      continue;
    }
    const auto mhp = min_hop_path(graph, s, d);
    ++result.sampled;
    if (sdp->hop_count == mhp->hop_count) ++result.matched;
  }
  result.fraction =
      result.sampled == 0 ? 1.0 : static_cast<double>(result.matched) / result.sampled;
  return result;
}

SdpMhpResult sdp_mhp_fraction(const ConstellationConfig& config, const TopologySettings& settings,
                              int sample_pairs, std::span<const double> epochs,
                              std::uint64_t rng_seed) {
  if (sample_pairs < 1) throw std::invalid_argument("sdp_mhp_fraction: sample_pairs must be >= 1");
  config.validate();
  if (config.size() < 2) throw std::invalid_argument("sdp_mhp_fraction: need >= 2 satellites");
  std::mt19937_64 rng(rng_seed);
  std::uniform_int_distribution<int> pick(0, config.size() - 1);
  SdpMhpResult total;
  for (double epoch : epochs) {
    const auto snap = build_satellite_topology(config, settings, epoch);
    const Graph graph(snap, true);
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(sample_pairs));
    while (static_cast<int>(pairs.size()) < sample_pairs) {
      const int s = pick(rng);
      const int d = pick(rng);
      if (s != d) pairs.emplace_back(s, d);
    }
    const auto r = sdp_mhp_fraction(graph, pairs);
    total.matched += r.matched;
    total.sampled += r.sampled;
    total.disconnected += r.disconnected;
  }
  total.fraction = total.sampled == 0 ? 1.0 : static_cast<double>(total.matched) / total.sampled;
  return total;
}

}  // namespace leoisl
