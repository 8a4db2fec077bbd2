#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "leoisl/ifc.hpp"

namespace leoisl::ifc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CacheSource {
  int sat;       // holder satellite
  bool local;    // the serving satellite itself
  double prop_s; // ISL propagation, 0 for the local copy
};

struct Candidate {
  int sat;
  double dl_prop_s;
  double dl_rate_bps;
  std::vector<CacheSource> sources;  // local copy first, then peers by id
};

double set_delay(const Candidate& c, const std::vector<int>& chosen, double bits, double isl_rate,
                 DelayModel model) {
  if (chosen.empty()) return kInf;
  const int n = static_cast<int>(chosen.size());
  const double dl = c.dl_rate_bps / n;
  std::vector<RatioSource> src;
  for (int i : chosen) {
    const auto& s = c.sources[static_cast<std::size_t>(i)];
    double rate = dl;
    if (!s.local) {
      rate = model == DelayModel::cut_through ? std::min(dl, isl_rate)
                                              : 1.0 / (1.0 / dl + 1.0 / isl_rate);
    }
    src.push_back({s.prop_s + c.dl_prop_s, rate});
  }
  return water_level(src, bits).delay_s;
}

int isl_count(const Candidate& c, const std::vector<int>& chosen) {
  int n = 0;
  for (int i : chosen) n += c.sources[static_cast<std::size_t>(i)].local ? 0 : 1;
  return n;
}

struct Choice {
  double delay = kInf;
  std::vector<int> chosen;
};

Choice exhaustive(const Candidate& c, int max_isls, double bits, double isl_rate, DelayModel model) {
  Choice best;
  const int m = static_cast<int>(c.sources.size());
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<int> chosen;
    for (int i = 0; i < m; ++i) {
      if (mask & (1u << i)) chosen.push_back(i);
    }
    if (isl_count(c, chosen) > max_isls) continue;
    const double d = set_delay(c, chosen, bits, isl_rate, model);
    if (d < best.delay) best = {d, std::move(chosen)};
  }
  return best;
}

// Local copy first, then holders by descending single-stream rate (nearest
// first among equals), added while the delay drops.
Choice greedy_choice(const Candidate& c, int max_isls, double bits, double isl_rate, DelayModel model) {
  std::vector<int> order(c.sources.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  auto single_rate = [&](int i) {
    if (c.sources[static_cast<std::size_t>(i)].local) return c.dl_rate_bps;
    return model == DelayModel::cut_through ? std::min(c.dl_rate_bps, isl_rate)
                                            : 1.0 / (1.0 / c.dl_rate_bps + 1.0 / isl_rate);
  };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& sa = c.sources[static_cast<std::size_t>(a)];
    const auto& sb = c.sources[static_cast<std::size_t>(b)];
    if (sa.local != sb.local) return sa.local;
    const double ra = single_rate(a);
    const double rb = single_rate(b);
    if (ra != rb) return ra > rb;
    return sa.prop_s < sb.prop_s;
  });
  Choice best;
  for (int i : order) {
    auto trial = best.chosen;
    trial.push_back(i);
    std::sort(trial.begin(), trial.end());
    if (isl_count(c, trial) > max_isls) {
      if (best.chosen.empty()) continue;
      break;
    }
    const double d = set_delay(c, trial, bits, isl_rate, model);
    if (!best.chosen.empty() && !(d < best.delay)) break;
    best = {d, std::move(trial)};
  }
  return best;
}

// Add, drop and pairwise-swap moves from the greedy seed until none helps.
Choice swap_search(const Candidate& c, int max_isls, double bits, double isl_rate, DelayModel model,
                   int max_iterations) {
  Choice cur = greedy_choice(c, max_isls, bits, isl_rate, model);
  if (cur.chosen.empty()) return cur;
  const int m = static_cast<int>(c.sources.size());
  for (int it = 0; it < max_iterations; ++it) {
    Choice best = cur;
    auto consider = [&](std::vector<int> trial) {
      std::sort(trial.begin(), trial.end());
      if (trial.empty() || isl_count(c, trial) > max_isls) return;
      const double d = set_delay(c, trial, bits, isl_rate, model);
      if (d < best.delay) best = {d, std::move(trial)};
    };
    for (int o = 0; o < m; ++o) {
      if (std::binary_search(cur.chosen.begin(), cur.chosen.end(), o)) continue;
      auto add = cur.chosen;
      add.push_back(o);
      consider(add);
      for (std::size_t j = 0; j < cur.chosen.size(); ++j) {
        auto swap = cur.chosen;
        swap[j] = o;
        consider(swap);
      }
    }
    for (std::size_t j = 0; j < cur.chosen.size(); ++j) {
      auto drop = cur.chosen;
      drop.erase(drop.begin() + static_cast<std::ptrdiff_t>(j));
      consider(drop);
    }
    if (!(best.delay < cur.delay)) break;
    cur = std::move(best);
  }
  return cur;
}

}  // namespace

FilePlan plan_cached(const FileRequest& request, const SlotNetwork& network, int max_isls,
                     PlanMode mode, const IfcSettings& settings) {
  if (!request.cached) throw std::invalid_argument("plan_cached: request is not cached");
  if (max_isls < 0) throw std::invalid_argument("plan_cached: max_isls must be >= 0");
  if (request.aircraft < 0 || request.aircraft >= network.num_aircraft())
    throw std::invalid_argument("plan_cached: unknown aircraft");
  settings.validate();
  const int limit = mode == PlanMode::fully_connected ? kUnlimitedIsls : max_isls;
  const double bits = request.bits();
  const double isl_rate = network.isl_rate_bps();
  const DelayModel model = settings.delay_model;

  std::vector<int> holders = request.cache_holders;
  std::sort(holders.begin(), holders.end());
  auto is_holder = [&](int s) { return std::binary_search(holders.begin(), holders.end(), s); };

  auto links = network.aircraft_links(request.aircraft);
  std::sort(links.begin(), links.end(), [](const auto& x, const auto& y) {
    return std::tie(x.distance_km, x.sat) < std::tie(y.distance_km, y.sat);
  });
  std::vector<Candidate> cands;
  for (const auto& l : links) {
    if (!(l.capacity_bps > 0.0)) continue;
    Candidate c{l.sat, propagation_delay_s(l.distance_km), l.capacity_bps, {}};
    if (is_holder(l.sat)) c.sources.push_back({l.sat, true, 0.0});
    for (const auto& p : network.isl_peers(l.sat)) {
      if (is_holder(p.sat)) c.sources.push_back({p.sat, false, propagation_delay_s(p.distance_km)});
    }
    cands.push_back(std::move(c));
  }

  FilePlan plan;
  plan.request_id = request.request_id;
  plan.aircraft = request.aircraft;
  plan.cached = true;

  Choice best;
  int best_cand = -1;
  for (int ci = 0; ci < static_cast<int>(cands.size()); ++ci) {
    const auto& c = cands[static_cast<std::size_t>(ci)];
    if (c.sources.empty()) continue;
    Choice ch;
    if (mode == PlanMode::greedy) {
      ch = greedy_choice(c, limit, bits, isl_rate, model);
      if (!ch.chosen.empty()) {
        best = std::move(ch);
        best_cand = ci;
        break;
      }
      continue;
    }
    const int holder_peers = static_cast<int>(c.sources.size()) - (c.sources.front().local ? 1 : 0);
    ch = holder_peers <= settings.exhaustive_candidate_limit
             ? exhaustive(c, limit, bits, isl_rate, model)
             : swap_search(c, limit, bits, isl_rate, model, settings.local_search_max_iterations);
    if (ch.delay < best.delay) {
      best = std::move(ch);
      best_cand = ci;
    }
  }
  if (best_cand < 0 || !std::isfinite(best.delay)) return plan;

  const auto& c = cands[static_cast<std::size_t>(best_cand)];
  const int n = static_cast<int>(best.chosen.size());
  const double dl = c.dl_rate_bps / n;
  std::vector<RatioSource> src;
  for (int i : best.chosen) {
    const auto& s = c.sources[static_cast<std::size_t>(i)];
    const double rate = s.local ? dl
                        : model == DelayModel::cut_through ? std::min(dl, isl_rate)
                                                           : 1.0 / (1.0 / dl + 1.0 / isl_rate);
    src.push_back({s.prop_s + c.dl_prop_s, rate});
  }
  const auto sol = optimal_ratio_delay(src, bits);
  plan.delivered = true;
  plan.serving_sat = c.sat;
  plan.delay_s = best.delay;
  for (std::size_t j = 0; j < best.chosen.size(); ++j) {
    const auto& s = c.sources[static_cast<std::size_t>(best.chosen[j])];
    StreamPlan st;
    st.kind = s.local ? SourceKind::local_cache : SourceKind::cache_holder;
    st.source_sat = s.sat;
    st.via_isl = !s.local;
    st.prop_s = src[j].prop_s;
    st.rate_bps = src[j].rate_bps;
    st.ratio = sol.ratios[j];
    plan.streams.push_back(st);
  }
  return plan;
}

}  // namespace leoisl::ifc
