#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "leoisl/orbital.hpp"
#include "leoisl/scenario.hpp"
#include "leoisl/topology.hpp"

using namespace leoisl;

namespace {

std::set<std::pair<int, int>> isl_set(const TopologySnapshot& s) {
  std::set<std::pair<int, int>> out;
  for (const auto& e : s.edges()) {
    if (e.link_class == LinkClass::isl_laser) out.insert({e.a, e.b});
  }
  return out;
}

SatelliteState at(int slot, double x, double y, double z) {
  SatelliteState s;
  s.id = {0, slot};
  s.position_km = Vec3(x, y, z);
  return s;
}

}  // namespace

TEST_SUITE("topology") {

TEST_CASE("grid: four links when every neighbour is visible") {
  ConstellationConfig cfg;
  for (double t : {0.0, 1234.5, 4000.0}) {
    const auto st = propagate(cfg, t);
    const auto snap = build_grid_topology(st, cfg, t);
    std::map<int, int> visible_neighbours;
    for (int p = 0; p < cfg.num_planes; ++p) {
      for (int s = 0; s < cfg.sats_per_plane; ++s) {
        const int i = p * cfg.sats_per_plane + s;
        const int nbrs[4] = {p * cfg.sats_per_plane + (s + 1) % cfg.sats_per_plane,
                             p * cfg.sats_per_plane + (s + cfg.sats_per_plane - 1) % cfg.sats_per_plane,
                             ((p + 1) % cfg.num_planes) * cfg.sats_per_plane + s,
                             ((p + cfg.num_planes - 1) % cfg.num_planes) * cfg.sats_per_plane + s};
        for (int j : nbrs) {
          if (visible(st[static_cast<std::size_t>(i)].position_km, st[static_cast<std::size_t>(j)].position_km))
            ++visible_neighbours[i];
        }
      }
    }
    for (int i = 0; i < cfg.size(); ++i) {
      CHECK(snap.isl_degree(i) <= 4);
      CHECK(snap.isl_degree(i) == visible_neighbours[i]);
    }
    // Handshake lemma: 240 undirected edges minus those lost to occlusion.
    int degree_sum = 0;
    for (int i = 0; i < cfg.size(); ++i) degree_sum += snap.isl_degree(i);
    CHECK(static_cast<int>(snap.isl_edge_count()) * 2 == degree_sum);
    CHECK(snap.isl_edge_count() <= 240);
  }
}

TEST_CASE("grid: exactly four with visible neighbours at low separation") {
  // 30 degree spacing in both directions keeps every neighbour in sight.
  ConstellationConfig cfg{12, 12, 1000.0, 53.0, 0, 360.0};
  const auto snap = build_grid_topology(propagate(cfg, 0.0), cfg);
  for (int i = 0; i < cfg.size(); ++i) CHECK(snap.isl_degree(i) == 4);
  CHECK(snap.isl_edge_count() == 288);

  // A partial RAAN spread has no seam: the outer planes lose one link.
  ConstellationConfig partial{4, 12, 1000.0, 53.0, 0, 40.0};
  const auto ps = build_grid_topology(propagate(partial, 0.0), partial);
  for (int i = 0; i < partial.size(); ++i) {
    const int plane = i / partial.sats_per_plane;
    CHECK(ps.isl_degree(i) == (plane == 0 || plane == 3 ? 3 : 4));
  }
  CHECK(ps.isl_edge_count() == 84);
}

TEST_CASE("grid: degenerate shapes") {
  ConstellationConfig ring{1, 8, 1000.0, 53.0, 0, 360.0};
  const auto snap = build_grid_topology(propagate(ring, 0.0), ring);
  for (int i = 0; i < ring.size(); ++i) CHECK(snap.isl_degree(i) == 2);
  CHECK(snap.isl_edge_count() == 8);

  // 60 degrees apart at 1000 km the chord dips below the grazing altitude.
  ConstellationConfig sparse{1, 6, 1000.0, 53.0, 0, 360.0};
  CHECK(build_grid_topology(propagate(sparse, 0.0), sparse).isl_edge_count() == 0);

  ConstellationConfig tiny{2, 2, 1000.0, 53.0, 0, 360.0};
  const auto st = propagate(tiny, 0.0);
  const auto s2 = build_grid_topology(st, tiny);
  // Neighbour rule gives a 4-cycle; duplicates collapse.
  CHECK(s2.isl_edge_count() <= 4);
  const auto e = isl_set(s2);
  CHECK(e.size() == s2.isl_edge_count());
}

TEST_CASE("grid structure is stable across epochs up to visibility") {
  ConstellationConfig cfg;
  std::set<std::pair<int, int>> all;
  for (int k = 0; k < 12; ++k) {
    const double t = k * 500.0;
    const auto s = isl_set(build_grid_topology(propagate(cfg, t), cfg, t));
    all.insert(s.begin(), s.end());
  }
  CHECK(all.size() <= 240);
}

TEST_CASE("dynamic: degree bound, visibility, range, nesting") {
  ConstellationConfig cfg;
  for (double t : {0.0, 777.0, 3100.0}) {
    const auto st = propagate(cfg, t);
    for (auto policy : {LinkPolicy::nearest_first, LinkPolicy::intra_orbit_preferred}) {
      std::set<std::pair<int, int>> prev;
      for (int k = 0; k <= 9; ++k) {
        const auto snap = build_dynamic_topology(st, k, 5000.0, policy, t);
        for (int i = 0; i < cfg.size(); ++i) CHECK(snap.isl_degree(i) <= k);
        for (const auto& e : snap.edges()) {
          const auto& a = st[static_cast<std::size_t>(e.a)].position_km;
          const auto& b = st[static_cast<std::size_t>(e.b)].position_km;
          CHECK(visible(a, b));
          CHECK(e.distance_km <= 5000.0);
          CHECK(e.distance_km == doctest::Approx((a - b).norm()));
          CHECK(e.capacity_bps == 1e10);
          CHECK(e.delay_s == doctest::Approx(propagation_delay_s(e.distance_km)));
        }
        const auto cur = isl_set(snap);
        CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
        prev = cur;
      }
    }
  }
}

TEST_CASE("dynamic: zero and unlimited limits") {
  ConstellationConfig cfg;
  const auto st = propagate(cfg, 0.0);
  CHECK(build_dynamic_topology(st, 0, 5000.0, LinkPolicy::nearest_first).isl_edge_count() == 0);

  const auto full = build_dynamic_topology(st, kUnlimitedIsls, 5000.0, LinkPolicy::nearest_first);
  std::size_t expected = 0;
  for (std::size_t i = 0; i < st.size(); ++i) {
    for (std::size_t j = i + 1; j < st.size(); ++j) {
      const double d = (st[i].position_km - st[j].position_km).norm();
      if (d <= 5000.0 && visible(st[i].position_km, st[j].position_km)) ++expected;
    }
  }
  CHECK(full.isl_edge_count() == expected);
}

TEST_CASE("dynamic: three collinear satellites, one link each") {
  std::vector<SatelliteState> st{at(0, 7371.0, 0.0, 0.0), at(1, 7371.0, 100.0, 0.0),
                                 at(2, 7371.0, 300.0, 0.0)};
  const auto snap = build_dynamic_topology(st, 1, 5000.0, LinkPolicy::nearest_first);
  REQUIRE(snap.isl_edge_count() == 1);
  CHECK(snap.edges()[0].a == 0);
  CHECK(snap.edges()[0].b == 1);
}

TEST_CASE("dynamic: intra-orbit preference") {
  // Satellite 0's nearest peer is in another plane, but the policy ranks
  // the in-plane link first.
  std::vector<SatelliteState> st{at(0, 7371.0, 0.0, 0.0), at(1, 7371.0, 300.0, 0.0),
                                 at(0, 7371.0, 0.0, 100.0)};
  st[0].id = {0, 0};
  st[1].id = {0, 1};
  st[2].id = {1, 0};
  const auto nearest = build_dynamic_topology(st, 1, 5000.0, LinkPolicy::nearest_first);
  const auto intra = build_dynamic_topology(st, 1, 5000.0, LinkPolicy::intra_orbit_preferred);
  REQUIRE(nearest.isl_edge_count() == 1);
  REQUIRE(intra.isl_edge_count() == 1);
  CHECK(nearest.edges()[0].b == 2);
  CHECK(intra.edges()[0].b == 1);
}

TEST_CASE("ground links") {
  const LinkBudgetSet links;
  SUBCASE("polar station sees no equatorial satellite") {
    ConstellationConfig eq{1, 10, 1000.0, 0.0, 0, 360.0};
    const auto snap = build_dynamic_topology(propagate(eq, 0.0), 4, 5000.0, LinkPolicy::nearest_first);
    const std::vector<GroundNode> g{make_ground_station("pole", 90.0, 0.0)};
    const auto with = attach_ground_links(snap, g, links);
    for (const auto& e : with.edges()) CHECK(e.link_class == LinkClass::isl_laser);
  }
  SUBCASE("aircraft at the nadir") {
    ConstellationConfig one{1, 1, 1000.0, 53.0, 0, 360.0};
    const auto snap = build_dynamic_topology(propagate(one, 0.0), 1, 5000.0, LinkPolicy::nearest_first);
    const std::vector<GroundNode> g{make_aircraft("ac", 0.0, 0.0, 0.0, 0.23, 10.7)};
    const auto with = attach_ground_links(snap, g, links);
    REQUIRE(with.edges().size() == 1);
    const auto& e = with.edges()[0];
    CHECK(e.link_class == LinkClass::sat_to_air);
    CHECK(e.distance_km == doctest::Approx(1000.0 - 10.7));
    CHECK(e.capacity_bps == doctest::Approx(capacity_bps(links.sat_to_air, e.distance_km)));
  }
  SUBCASE("default stations see the 53 degree constellation") {
    ConstellationConfig cfg;
    const auto stations = default_ground_stations();
    for (double t : {0.0, 900.0, 2700.0}) {
      const auto snap = build_dynamic_topology(propagate(cfg, t), 4, 5000.0, LinkPolicy::nearest_first, t);
      const auto with = attach_ground_links(snap, stations, links);
      std::map<int, int> per_gs;
      for (const auto& e : with.edges()) {
        if (e.link_class != LinkClass::ground_to_sat) continue;
        ++per_gs[e.b];
        const Vec3 g = ground_position(stations[static_cast<std::size_t>(e.b - cfg.size())], t);
        CHECK(visible_from_ground(g, propagate(cfg, t)[static_cast<std::size_t>(e.a)].position_km));
      }
      MESSAGE("epoch " << t << ": " << per_gs.size() << " of 5 stations see a satellite");
    }
  }
  SUBCASE("ground-to-air links between a station and an aircraft nearby") {
    ConstellationConfig cfg;
    const auto snap = build_dynamic_topology(propagate(cfg, 0.0), 4, 5000.0, LinkPolicy::nearest_first);
    const std::vector<GroundNode> g{make_ground_station("gs", 51.5, 0.0),
                                    make_aircraft("ac", 51.6, 0.2, 90.0)};
    const auto with = attach_ground_links(snap, g, links);
    int g2a = 0;
    for (const auto& e : with.edges()) {
      if (e.link_class == LinkClass::ground_to_air) ++g2a;
    }
    CHECK(g2a == 1);
  }
}

TEST_CASE("edge CSV") {
  ConstellationConfig cfg;
  const auto snap = build_grid_topology(propagate(cfg, 0.0), cfg);
  const auto text = edges_to_csv(snap);
  CHECK(text.rfind("epoch_s,node_a,node_b,link_class,distance_km,capacity_bps,delay_s\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == snap.edges().size() + 1);
  CHECK(text == edges_to_csv(build_grid_topology(propagate(cfg, 0.0), cfg)));
}

}
