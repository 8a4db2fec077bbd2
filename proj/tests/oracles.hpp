#pragma once

// Reference implementations used only by tests. They are deliberately naive
// (brute force, bisection, fixed-step integration) and share no code with
// the library beyond its data types.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "leoisl/bandwidth.hpp"
#include "leoisl/ifc.hpp"
#include "leoisl/link_budget.hpp"
#include "leoisl/orbital.hpp"
#include "leoisl/routing.hpp"
#include "leoisl/topology.hpp"
#include "leoisl/waterfill.hpp"

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Two-body period by RK4 integration of r'' = -mu r / |r|^3, starting on the
// +x axis with circular speed; the period is the first time the trajectory
// crosses the +x half-plane upward again.

inline double rk4_period(double radius_km, double mu = leoisl::kEarthMuKm3S2, double dt = 0.5) {
  using S = std::array<double, 4>;  // x, y, vx, vy
  auto deriv = [mu](const S& s) {
    const double r = std::hypot(s[0], s[1]);
    const double k = -mu / (r * r * r);
    return S{s[2], s[3], k * s[0], k * s[1]};
  };
  auto axpy = [](const S& a, double h, const S& b) {
    return S{a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2], a[3] + h * b[3]};
  };
  S s{radius_km, 0.0, 0.0, std::sqrt(mu / radius_km)};
  double t = 0.0;
  bool left_axis = false;
  for (;;) {
    const S k1 = deriv(s);
    const S k2 = deriv(axpy(s, dt / 2, k1));
    const S k3 = deriv(axpy(s, dt / 2, k2));
    const S k4 = deriv(axpy(s, dt, k3));
    S next;
    for (int i = 0; i < 4; ++i) next[i] = s[i] + dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    if (next[1] < 0.0) left_axis = true;
    if (left_axis && s[1] < 0.0 && next[1] >= 0.0 && next[0] > 0.0) {
      // Cubic Hermite on y(t) over the step, solved by bisection.
      const double y0 = s[1], y1 = next[1], d0 = s[3] * dt, d1 = next[3] * dt;
      auto y = [&](double u) {
        const double h00 = 2 * u * u * u - 3 * u * u + 1, h10 = u * u * u - 2 * u * u + u;
        const double h01 = -2 * u * u * u + 3 * u * u, h11 = u * u * u - u * u;
        return h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1;
      };
      double lo = 0.0, hi = 1.0;
      for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (y(mid) < 0.0 ? lo : hi) = mid;
      }
      return t + 0.5 * (lo + hi) * dt;
    }
    s = next;
    t += dt;
  }
}

// ---------------------------------------------------------------------------
// Paths by exhaustive simple-path enumeration.

struct BrutePath {
  double distance = kInf;
  int hops = -1;
  std::vector<int> nodes;
};

/// Best simple path from src to dst under (distance, hops, sequence) or
/// (hops, distance, sequence). Ground nodes (non-satellites) never relay.
inline std::optional<BrutePath> brute_force_path(const leoisl::TopologySnapshot& snap, int src,
                                                 int dst, bool by_hops) {
  const int n = snap.num_nodes();
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
  for (const auto& e : snap.edges()) {
    adj[static_cast<std::size_t>(e.a)].push_back({e.b, e.distance_km});
    adj[static_cast<std::size_t>(e.b)].push_back({e.a, e.distance_km});
  }
  std::optional<BrutePath> best;
  std::vector<int> stack{src};
  std::vector<char> on(static_cast<std::size_t>(n), 0);
  on[static_cast<std::size_t>(src)] = 1;
  auto key = [by_hops](const BrutePath& p) {
    return by_hops ? std::make_tuple(static_cast<double>(p.hops), p.distance, p.nodes)
                   : std::make_tuple(p.distance, static_cast<double>(p.hops), p.nodes);
  };
  std::function<void(int, double)> dfs = [&](int u, double dist) {
    if (u == dst) {
      BrutePath p{dist, static_cast<int>(stack.size()) - 1, stack};
      if (!best || key(p) < key(*best)) best = p;
      return;
    }
    if (u != src && snap.nodes()[static_cast<std::size_t>(u)].kind != leoisl::NodeKind::satellite) return;
    for (const auto& [v, d] : adj[static_cast<std::size_t>(u)]) {
      if (on[static_cast<std::size_t>(v)]) continue;
      on[static_cast<std::size_t>(v)] = 1;
      stack.push_back(v);
      dfs(v, dist + d);
      stack.pop_back();
      on[static_cast<std::size_t>(v)] = 0;
    }
  };
  if (src == dst) return BrutePath{0.0, 0, {src}};
  dfs(src, 0.0);
  return best;
}

/// Random undirected graph of satellites only. With integer_weights the
/// distances are small integers so that ties are common.
inline leoisl::TopologySnapshot random_graph(std::mt19937_64& rng, int n, double density,
                                             bool integer_weights) {
  std::vector<leoisl::SnapshotNode> nodes;
  for (int i = 0; i < n; ++i) {
    leoisl::SnapshotNode node;
    node.id = "n" + std::to_string(i);
    node.kind = leoisl::NodeKind::satellite;
    nodes.push_back(node);
  }
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> small(1, 4);
  std::uniform_real_distribution<double> dist(100.0, 5000.0);
  std::vector<leoisl::Edge> edges;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (u01(rng) >= density) continue;
      leoisl::Edge e;
      e.a = a;
      e.b = b;
      e.distance_km = integer_weights ? small(rng) : dist(rng);
      e.capacity_bps = 1e10;
      e.delay_s = leoisl::propagation_delay_s(e.distance_km);
      edges.push_back(e);
    }
  }
  return leoisl::TopologySnapshot(0.0, std::move(nodes), std::move(edges), n);
}

// ---------------------------------------------------------------------------
// Water level by bisection on sum_c max(0, D - p_c) r_c = bits.

inline double bisection_delay(std::span<const leoisl::RatioSource> sources, double bits) {
  double lo = kInf, hi = kInf;
  for (const auto& s : sources) {
    if (s.rate_bps <= 0.0) continue;
    lo = std::min(lo, s.prop_s);
    hi = std::min(hi, s.prop_s + bits / s.rate_bps);
  }
  if (!std::isfinite(lo)) return kInf;
  auto served = [&](double d) {
    double total = 0.0;
    for (const auto& s : sources) {
      if (s.rate_bps > 0.0) total += std::max(0.0, d - s.prop_s) * s.rate_bps;
    }
    return total;
  };
  for (int i = 0; i < 400 && lo < hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (served(mid) < bits ? lo : hi) = mid;
  }
  return hi;
}

/// Completion time of a given split: max over used sources of p + x bits / r.
inline double split_delay(std::span<const leoisl::RatioSource> sources, std::span<const double> x,
                          double bits) {
  double worst = 0.0;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (x[i] <= 0.0) continue;
    if (sources[i].rate_bps <= 0.0) return kInf;
    worst = std::max(worst, sources[i].prop_s + x[i] * bits / sources[i].rate_bps);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Feeder shares by grid search over multiples of `step` with sum <= 1.

struct GridResult {
  double total_delay = kInf;
  std::vector<double> shares;
};

inline GridResult grid_search_shares(std::span<const leoisl::ShareDemand> demands,
                                     leoisl::DelayModel model, double step = 0.01) {
  const int n = static_cast<int>(demands.size());
  const int steps = static_cast<int>(std::lround(1.0 / step));
  // The objective is a sum of per-demand delays, so tabulate each one once.
  std::vector<std::vector<double>> table(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    auto& t = table[static_cast<std::size_t>(j)];
    t.assign(static_cast<std::size_t>(steps + 1), kInf);
    for (int v = 1; v <= steps; ++v) {
      t[static_cast<std::size_t>(v)] = leoisl::demand_delay(demands[static_cast<std::size_t>(j)], v * step, model);
    }
  }
  GridResult best;
  std::vector<int> k(static_cast<std::size_t>(n), 1);
  std::function<void(int, int, double)> rec = [&](int i, int used, double partial) {
    if (i == n) {
      if (partial < best.total_delay) {
        best.total_delay = partial;
        best.shares.clear();
        for (int v : k) best.shares.push_back(v * step);
      }
      return;
    }
    for (int v = 1; used + v + (n - i - 1) <= steps; ++v) {
      k[static_cast<std::size_t>(i)] = v;
      rec(i + 1, used + v, partial + table[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)]);
    }
  };
  rec(0, 0, 0.0);
  return best;
}

// ---------------------------------------------------------------------------
// Cached-file plan by enumeration of every (serving satellite, source subset).

struct CachedChoice {
  double delay = kInf;
  int serving = -1;
  std::vector<int> sources;
};

inline CachedChoice enumerate_cached(const leoisl::ifc::FileRequest& req,
                                     const leoisl::ifc::SlotNetwork& net, int max_isls,
                                     leoisl::DelayModel model) {
  CachedChoice best;
  const double bits = req.bits();
  const double isl = net.isl_rate_bps();
  auto holds = [&](int s) {
    return std::find(req.cache_holders.begin(), req.cache_holders.end(), s) != req.cache_holders.end();
  };
  for (const auto& link : net.aircraft_links(req.aircraft)) {
    if (!(link.capacity_bps > 0.0)) continue;
    struct Src {
      int sat;
      bool local;
      double prop;
    };
    std::vector<Src> pool;
    if (holds(link.sat)) pool.push_back({link.sat, true, 0.0});
    for (const auto& p : net.isl_peers(link.sat)) {
      if (holds(p.sat)) pool.push_back({p.sat, false, leoisl::propagation_delay_s(p.distance_km)});
    }
    const int m = static_cast<int>(pool.size());
    for (int mask = 1; mask < (1 << m); ++mask) {
      int isls = 0;
      int count = 0;
      for (int i = 0; i < m; ++i) {
        if (mask >> i & 1) {
          ++count;
          isls += pool[static_cast<std::size_t>(i)].local ? 0 : 1;
        }
      }
      if (isls > max_isls) continue;
      const double share = link.capacity_bps / count;
      std::vector<leoisl::RatioSource> src;
      std::vector<int> ids;
      for (int i = 0; i < m; ++i) {
        if (!(mask >> i & 1)) continue;
        const auto& s = pool[static_cast<std::size_t>(i)];
        double rate = share;
        if (!s.local) {
          rate = model == leoisl::DelayModel::cut_through ? std::min(share, isl)
                                                          : 1.0 / (1.0 / share + 1.0 / isl);
        }
        src.push_back({s.prop + leoisl::propagation_delay_s(link.distance_km), rate});
        ids.push_back(s.sat);
      }
      const double d = leoisl::optimal_ratio_delay(src, bits).delay_s;
      if (d < best.delay) best = {d, link.sat, ids};
    }
  }
  return best;
}

}  // namespace oracle
