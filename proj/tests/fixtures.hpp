#pragma once

// Hand-built networks for planner tests.

#include <algorithm>
#include <cmath>
#include <tuple>
#include <random>
#include <string>
#include <vector>

#include "leoisl/ifc.hpp"
#include "leoisl/link_budget.hpp"
#include "leoisl/topology.hpp"

namespace fixture {

struct NetBuilder {
  int sats = 0;
  int stations = 0;
  int aircraft = 0;
  leoisl::LinkBudgetSet links;
  std::vector<leoisl::Edge> edges;

  int gs_node(int g) const { return sats + g; }
  int air_node(int a) const { return sats + stations + a; }

  void isl(int a, int b, double km) {
    edges.push_back({std::min(a, b), std::max(a, b), leoisl::LinkClass::isl_laser, km,
                     links.isl_laser.lisl_fixed_rate_bps, leoisl::propagation_delay_s(km)});
  }
  void air(int sat, int a, double km) {
    edges.push_back({sat, air_node(a), leoisl::LinkClass::sat_to_air, km,
                     leoisl::capacity_bps(links.sat_to_air, km), leoisl::propagation_delay_s(km)});
  }
  void feeder(int sat, int g, double km) {
    edges.push_back({sat, gs_node(g), leoisl::LinkClass::ground_to_sat, km,
                     leoisl::capacity_bps(links.ground_to_sat, km), leoisl::propagation_delay_s(km)});
  }

  leoisl::TopologySnapshot snapshot() const {
    std::vector<leoisl::SnapshotNode> nodes;
    for (int i = 0; i < sats; ++i) nodes.push_back({"s" + std::to_string(i), leoisl::NodeKind::satellite, {}, 0, i});
    for (int g = 0; g < stations; ++g) nodes.push_back({"g" + std::to_string(g), leoisl::NodeKind::ground_station, {}, -1, -1});
    for (int a = 0; a < aircraft; ++a) nodes.push_back({"a" + std::to_string(a), leoisl::NodeKind::aircraft, {}, -1, -1});
    auto sorted = edges;
    std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) {
      return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    return leoisl::TopologySnapshot(0.0, std::move(nodes), std::move(sorted), leoisl::kUnlimitedIsls);
  }
  leoisl::ifc::SlotNetwork network() const { return leoisl::ifc::SlotNetwork(snapshot(), links); }
};

/// Random cached-delivery instance: at most `max_visible` satellites visible
/// to a single aircraft and at most `max_holders` cache holders.
struct CachedInstance {
  NetBuilder net;
  leoisl::ifc::FileRequest request;
  int max_isls = 0;
  leoisl::DelayModel model = leoisl::DelayModel::cut_through;
};

inline CachedInstance random_cached_instance(std::mt19937_64& rng, int max_visible = 4,
                                             int max_holders = 3) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  CachedInstance inst;
  auto& nb = inst.net;
  nb.sats = uniform_int(2, 7);
  nb.aircraft = 1;
  // ISL rates from well below to well above the downlink, so both regimes occur.
  nb.links.isl_laser.lisl_fixed_rate_bps = std::pow(10.0, uniform(8.0, 10.0));
  const int visible = uniform_int(1, std::min(max_visible, nb.sats));
  std::vector<int> order(static_cast<std::size_t>(nb.sats));
  for (int i = 0; i < nb.sats; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 0; i < visible; ++i) nb.air(order[static_cast<std::size_t>(i)], 0, uniform(1000.0, 2500.0));
  for (int a = 0; a < nb.sats; ++a) {
    for (int b = a + 1; b < nb.sats; ++b) {
      if (u01(rng) < 0.6) nb.isl(a, b, uniform(500.0, 5000.0));
    }
  }
  std::shuffle(order.begin(), order.end(), rng);
  const int holders = uniform_int(1, std::min(max_holders, nb.sats));
  auto& req = inst.request;
  req.cached = true;
  req.num_packets = uniform_int(10, 3000);
  req.cache_holders.assign(order.begin(), order.begin() + holders);
  inst.max_isls = uniform_int(0, 3);
  inst.model = u01(rng) < 0.5 ? leoisl::DelayModel::cut_through : leoisl::DelayModel::store_and_forward;
  return inst;
}

}  // namespace fixture
