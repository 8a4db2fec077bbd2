#include "leoisl/topology.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <tuple>

#include "leoisl/csv.hpp"

namespace leoisl {

std::string_view to_string(TopologyMode mode) {
  return mode == TopologyMode::grid ? "grid" : "dynamic";
}

std::string_view to_string(LinkPolicy policy) {
  return policy == LinkPolicy::nearest_first ? "nearest_first" : "intra_orbit_preferred";
}

TopologyMode topology_mode_from_string(std::string_view name) {
  if (name == "grid") return TopologyMode::grid;
  if (name == "dynamic") return TopologyMode::dynamic;
  throw std::invalid_argument("unknown topology mode '" + std::string(name) + "'");
}

LinkPolicy link_policy_from_string(std::string_view name) {
  if (name == "nearest_first") return LinkPolicy::nearest_first;
  if (name == "intra_orbit_preferred") return LinkPolicy::intra_orbit_preferred;
  throw std::invalid_argument("unknown link policy '" + std::string(name) + "'");
}

void TopologySettings::validate() const {
  if (max_isls < 0) throw std::invalid_argument("max_isls: must be >= 0");
  if (!(max_range_km > 0.0)) throw std::invalid_argument("max_range_km: must be > 0");
  if (grazing_altitude_km < 0.0) throw std::invalid_argument("grazing_altitude_km: must be >= 0");
  if (elevation_mask_deg < -90.0 || elevation_mask_deg > 90.0) {
    throw std::invalid_argument("elevation_mask_deg: must lie in [-90, 90]");
  }
}

TopologySnapshot::TopologySnapshot(double epoch_s, std::vector<SnapshotNode> nodes,
                                   std::vector<Edge> edges, int max_isl_degree)
    : epoch_s_(epoch_s),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      max_isl_degree_(max_isl_degree) {
  num_satellites_ = static_cast<int>(
      std::count_if(nodes_.begin(), nodes_.end(),
                    [](const SnapshotNode& n) { return n.kind == NodeKind::satellite; }));
  for (int i = 0; i < num_satellites_; ++i) {
    if (nodes_[static_cast<std::size_t>(i)].kind != NodeKind::satellite) {
      throw std::invalid_argument("snapshot: satellites must precede ground nodes");
    }
  }
  std::set<std::pair<int, int>> seen;
  for (auto& e : edges_) {
    if (e.a > e.b) std::swap(e.a, e.b);
    if (e.a == e.b || e.a < 0 || e.b >= num_nodes()) {
      throw std::invalid_argument("snapshot: invalid edge endpoints");
    }
    if (!seen.emplace(e.a, e.b).second) throw std::invalid_argument("snapshot: duplicate edge");
  }
}

std::optional<int> TopologySnapshot::find_node(std::string_view id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == id) return static_cast<int>(i);
  }
  return std::nullopt;
}

int TopologySnapshot::isl_degree(int node) const {
  int deg = 0;
  for (const auto& e : edges_) {
    if (e.link_class == LinkClass::isl_laser && (e.a == node || e.b == node)) ++deg;
  }
  return deg;
}

std::size_t TopologySnapshot::isl_edge_count() const {
  return static_cast<std::size_t>(std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) {
    return e.link_class == LinkClass::isl_laser;
  }));
}

std::vector<SnapshotNode> satellite_nodes(std::span<const SatelliteState> states) {
  std::vector<SnapshotNode> nodes;
  nodes.reserve(states.size());
  for (const auto& s : states) {
    nodes.push_back({satellite_node_id(s.id), NodeKind::satellite, s.position_km, s.id.plane,
                     s.id.slot});
  }
  return nodes;
}

namespace {

Edge make_edge(int a, int b, const Vec3& pa, const Vec3& pb, LinkClass cls,
               const LinkBudgetParams& params) {
  const double d = (pa - pb).norm();
  return Edge{std::min(a, b), std::max(a, b), cls, d, capacity_bps(params, d), propagation_delay_s(d)};
}

}  // namespace

TopologySnapshot build_grid_topology(std::span<const SatelliteState> states,
                                     const ConstellationConfig& config, double epoch_s,
                                     double grazing_altitude_km, const LinkBudgetParams& isl) {
  config.validate();
  if (states.size() != static_cast<std::size_t>(config.size())) {
    throw std::invalid_argument("build_grid_topology: state count does not match config");
  }
  const int planes = config.num_planes;
  const int slots = config.sats_per_plane;
  const bool wrap_planes = config.raan_spread_deg == 360.0 && planes >= 3;
  auto index = [slots](int p, int s) { return p * slots + s; };

  std::set<std::pair<int, int>> pairs;
  auto add = [&pairs](int a, int b) {
    if (a != b) pairs.emplace(std::min(a, b), std::max(a, b));
  };
  for (int p = 0; p < planes; ++p) {
    for (int s = 0; s < slots; ++s) {
      add(index(p, s), index(p, (s + 1) % slots));
      if (p + 1 < planes) {
        add(index(p, s), index(p + 1, s));
      } else if (wrap_planes) {
        add(index(p, s), index(0, s));
      }
    }
  }

  std::vector<Edge> edges;
  for (auto [a, b] : pairs) {
    const auto& pa = states[static_cast<std::size_t>(a)].position_km;
    const auto& pb = states[static_cast<std::size_t>(b)].position_km;
    if (!visible(pa, pb, grazing_altitude_km)) continue;
    edges.push_back(make_edge(a, b, pa, pb, LinkClass::isl_laser, isl));
  }
  return TopologySnapshot(epoch_s, satellite_nodes(states), std::move(edges), 4);
}

TopologySnapshot build_dynamic_topology(std::span<const SatelliteState> states, int max_isls,
                                        double max_range_km, LinkPolicy policy, double epoch_s,
                                        double grazing_altitude_km, const LinkBudgetParams& isl) {
  if (max_isls < 0) throw std::invalid_argument("build_dynamic_topology: max_isls must be >= 0");
  const int n = static_cast<int>(states.size());

  struct Candidate {
    int rank;  // 0 preferred, 1 otherwise
    double distance;
    int a;
    int b;
  };
  std::vector<Candidate> candidates;
  std::vector<int> candidate_degree(static_cast<std::size_t>(n), 0);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const auto& pa = states[static_cast<std::size_t>(a)].position_km;
      const auto& pb = states[static_cast<std::size_t>(b)].position_km;
      const double d = (pa - pb).norm();
      if (d > max_range_km || !visible(pa, pb, grazing_altitude_km)) continue;
      const bool intra = states[static_cast<std::size_t>(a)].id.plane ==
                         states[static_cast<std::size_t>(b)].id.plane;
      const int rank = (policy == LinkPolicy::intra_orbit_preferred && !intra) ? 1 : 0;
      candidates.push_back({rank, d, a, b});
      ++candidate_degree[static_cast<std::size_t>(a)];
      ++candidate_degree[static_cast<std::size_t>(b)];
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.rank, x.distance, x.a, x.b) < std::tie(y.rank, y.distance, y.a, y.b);
  });

  // Rounds beyond the largest candidate degree cannot admit anything new.
  const int max_candidate_degree =
      candidate_degree.empty() ? 0 : *std::max_element(candidate_degree.begin(), candidate_degree.end());
  const int rounds = std::min(max_isls, max_candidate_degree);

  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  std::vector<char> taken(candidates.size(), 0);
  for (int round = 1; round <= rounds; ++round) {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (taken[i]) continue;
      const auto& c = candidates[i];
      auto& da = degree[static_cast<std::size_t>(c.a)];
      auto& db = degree[static_cast<std::size_t>(c.b)];
      if (da < round && db < round) {
        taken[i] = 1;
        ++da;
        ++db;
      }
    }
  }

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!taken[i]) continue;
    const auto& c = candidates[i];
    edges.push_back(make_edge(c.a, c.b, states[static_cast<std::size_t>(c.a)].position_km,
                              states[static_cast<std::size_t>(c.b)].position_km,
                              LinkClass::isl_laser, isl));
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& x, const Edge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  return TopologySnapshot(epoch_s, satellite_nodes(states), std::move(edges), max_isls);
}

TopologySnapshot attach_ground_links(const TopologySnapshot& snapshot,
                                     std::span<const GroundNode> ground_nodes,
                                     const LinkBudgetSet& link_params,
                                     double elevation_mask_deg) {
  auto nodes = snapshot.nodes();
  auto edges = snapshot.edges();
  const int num_sats = snapshot.num_satellites();
  const int first_ground = static_cast<int>(nodes.size());
  for (const auto& g : ground_nodes) {
    g.validate();
    nodes.push_back({g.node_id,
                     g.kind == GroundKind::aircraft ? NodeKind::aircraft : NodeKind::ground_station,
                     ground_position(g, snapshot.epoch_s()), -1, -1});
  }
  for (int gi = first_ground; gi < static_cast<int>(nodes.size()); ++gi) {
    const auto& g = nodes[static_cast<std::size_t>(gi)];
    const LinkClass cls =
        g.kind == NodeKind::aircraft ? LinkClass::sat_to_air : LinkClass::ground_to_sat;
    for (int s = 0; s < num_sats; ++s) {
      const auto& sat = nodes[static_cast<std::size_t>(s)];
      if (!visible_from_ground(g.position_km, sat.position_km, elevation_mask_deg)) continue;
      edges.push_back(make_edge(s, gi, sat.position_km, g.position_km, cls, link_params[cls]));
    }
  }
  // Ground-to-air links, judged from the ground station's horizon.
  for (int gi = first_ground; gi < static_cast<int>(nodes.size()); ++gi) {
    const auto& gs = nodes[static_cast<std::size_t>(gi)];
    if (gs.kind != NodeKind::ground_station) continue;
    for (int ai = first_ground; ai < static_cast<int>(nodes.size()); ++ai) {
      const auto& ac = nodes[static_cast<std::size_t>(ai)];
      if (ac.kind != NodeKind::aircraft) continue;
      if (!visible_from_ground(gs.position_km, ac.position_km, elevation_mask_deg)) continue;
      edges.push_back(make_edge(gi, ai, gs.position_km, ac.position_km, LinkClass::ground_to_air,
                                link_params.ground_to_air));
    }
  }
  return TopologySnapshot(snapshot.epoch_s(), std::move(nodes), std::move(edges),
                          snapshot.max_isl_degree());
}

TopologySnapshot build_satellite_topology(const ConstellationConfig& config,
                                          const TopologySettings& settings, double epoch_s,
                                          const LinkBudgetParams& isl) {
  settings.validate();
  const auto states = propagate(config, epoch_s);
  if (settings.mode == TopologyMode::grid) {
    return build_grid_topology(states, config, epoch_s, settings.grazing_altitude_km, isl);
  }
  return build_dynamic_topology(states, settings.max_isls, settings.max_range_km, settings.policy,
                                epoch_s, settings.grazing_altitude_km, isl);
}

std::string edges_to_csv(const TopologySnapshot& snapshot, bool header) {
  std::string out;
  if (header) out += "epoch_s,node_a,node_b,link_class,distance_km,capacity_bps,delay_s\n";
  const auto& nodes = snapshot.nodes();
  for (const auto& e : snapshot.edges()) {
    out += csv::row({csv::number(snapshot.epoch_s()),
                     csv::field(nodes[static_cast<std::size_t>(e.a)].id),
                     csv::field(nodes[static_cast<std::size_t>(e.b)].id),
                     std::string(to_string(e.link_class)), csv::number(e.distance_km),
                     csv::number(e.capacity_bps), csv::number(e.delay_s)});
  }
  return out;
}

}  // namespace leoisl
