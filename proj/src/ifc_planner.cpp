#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "leoisl/ifc.hpp"

namespace leoisl::ifc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Local-search moves must beat the incumbent by this relative margin, which
// keeps rounding noise from cycling the search.
constexpr double kRelImprovement = 1e-13;
constexpr int kMaxBcdSweeps = 50;
constexpr int kMaxFullRounds = 5;
constexpr int kSingletonMoves = 3;

struct Option {
  SourceKind kind = SourceKind::local_cache;
  int gs = -1;
  int via = -1;  // satellite reached from the serving satellite over one ISL
  double prop_up_s = 0.0;
  double isl_rate_bps = kInf;
  ShannonChannel feeder;
};

struct Serving {
  int sat = -1;
  double dl_prop_s = 0.0;
  double dl_rate_bps = 0.0;
  std::vector<Option> options;
};

struct Problem {
  std::vector<FileRequest> requests;
  std::vector<std::vector<Serving>> serving;  // per request, nearest first
  DelayModel model = DelayModel::cut_through;
  int max_passes = 200;
  int num_gs = 0;
  int num_sats = 0;
};

Problem make_problem(std::span<const FileRequest> requests, const SlotNetwork& net,
                     const IfcSettings& settings) {
  settings.validate();
  Problem p;
  p.requests.assign(requests.begin(), requests.end());
  p.model = settings.delay_model;
  p.max_passes = settings.local_search_max_iterations;
  p.num_gs = net.num_ground_stations();
  p.num_sats = net.num_satellites();

  std::vector<std::vector<double>> gs_dist(static_cast<std::size_t>(p.num_gs),
                                           std::vector<double>(static_cast<std::size_t>(p.num_sats), -1.0));
  for (int g = 0; g < p.num_gs; ++g) {
    for (const auto& l : net.gs_links(g)) gs_dist[static_cast<std::size_t>(g)][static_cast<std::size_t>(l.sat)] = l.distance_km;
  }
  const auto& feeder_params = net.link_params().ground_to_sat;
  const double isl_rate = net.isl_rate_bps();

  std::vector<char> seen_aircraft(static_cast<std::size_t>(net.num_aircraft()), 0);
  for (const auto& req : p.requests) {
    if (req.aircraft < 0 || req.aircraft >= net.num_aircraft())
      throw std::invalid_argument("request " + std::to_string(req.request_id) + ": unknown aircraft");
    if (seen_aircraft[static_cast<std::size_t>(req.aircraft)]++)
      throw std::invalid_argument("request " + std::to_string(req.request_id) +
                                  ": aircraft already has a request in this slot");
    if (req.num_packets < 0 || req.packet_bits <= 0)
      throw std::invalid_argument("request " + std::to_string(req.request_id) + ": bad file size");
    std::vector<int> holders = req.cache_holders;
    std::sort(holders.begin(), holders.end());
    for (int h : holders) {
      if (h < 0 || h >= p.num_sats)
        throw std::invalid_argument("request " + std::to_string(req.request_id) + ": unknown cache holder");
    }
    for (int g : req.source_gs) {
      if (g < 0 || g >= p.num_gs)
        throw std::invalid_argument("request " + std::to_string(req.request_id) + ": unknown ground station");
    }
    auto is_holder = [&](int s) {
      return req.cached && std::binary_search(holders.begin(), holders.end(), s);
    };

    auto links = net.aircraft_links(req.aircraft);
    std::sort(links.begin(), links.end(), [](const auto& x, const auto& y) {
      return std::tie(x.distance_km, x.sat) < std::tie(y.distance_km, y.sat);
    });
    std::vector<Serving> cands;
    for (const auto& l : links) {
      if (!(l.capacity_bps > 0.0)) continue;
      Serving sv;
      sv.sat = l.sat;
      sv.dl_prop_s = propagation_delay_s(l.distance_km);
      sv.dl_rate_bps = l.capacity_bps;
      if (is_holder(sv.sat)) sv.options.push_back({SourceKind::local_cache, -1, -1, 0.0, kInf, {}});
      const auto& peers = net.isl_peers(sv.sat);
      if (req.cached) {
        for (const auto& peer : peers) {
          if (!is_holder(peer.sat)) continue;
          sv.options.push_back({SourceKind::cache_holder, -1, peer.sat,
                                propagation_delay_s(peer.distance_km), isl_rate, {}});
        }
      }
      for (int g : req.source_gs) {
        const auto& dist = gs_dist[static_cast<std::size_t>(g)];
        const double direct = dist[static_cast<std::size_t>(sv.sat)];
        if (direct >= 0.0) {
          sv.options.push_back({SourceKind::ground_station, g, -1, propagation_delay_s(direct), kInf,
                                ShannonChannel(feeder_params, direct)});
          continue;
        }
        for (const auto& peer : peers) {
          const double feed = dist[static_cast<std::size_t>(peer.sat)];
          if (feed < 0.0) continue;
          sv.options.push_back({SourceKind::ground_station, g, peer.sat,
                                propagation_delay_s(feed) + propagation_delay_s(peer.distance_km),
                                isl_rate, ShannonChannel(feeder_params, feed)});
        }
      }
      cands.push_back(std::move(sv));
    }
    p.serving.push_back(std::move(cands));
  }
  return p;
}

struct Assign {
  int serving = -1;  // index into Problem::serving[r]
  std::vector<int> opts;
  std::vector<double> beta;  // parallel to opts; used by ground-station options

  bool same_choice(const Assign& o) const { return serving == o.serving && opts == o.opts; }
};

struct Value {
  int undelivered = 0;
  double total = 0.0;
  bool operator<(const Value& o) const {
    if (undelivered != o.undelivered) return undelivered < o.undelivered;
    return total < o.total;
  }
};

bool strictly_better(const Value& a, const Value& b) {
  if (a.undelivered != b.undelivered) return a.undelivered < b.undelivered;
  return a.total < b.total - kRelImprovement * std::abs(b.total);
}

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

struct State {
  std::vector<Assign> files;
  std::vector<double> delay;
  std::map<EdgeKey, int> edge_use;
  std::vector<int> degree;

  int max_degree() const {
    return degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
  }
};

enum class Policy { equal_shares, optimize_shares };

class Planner {
 public:
  explicit Planner(const Problem& p) : p_(p) {}

  int num_files() const { return static_cast<int>(p_.requests.size()); }

  State empty_state() const {
    State s;
    s.files.resize(p_.requests.size());
    s.delay.assign(p_.requests.size(), kInf);
    s.degree.assign(static_cast<std::size_t>(p_.num_sats), 0);
    return s;
  }

  const Serving& serving_of(int r, int si) const {
    return p_.serving[static_cast<std::size_t>(r)][static_cast<std::size_t>(si)];
  }

  Value value(const State& s) const {
    Value v;
    for (double d : s.delay) {
      if (std::isfinite(d)) {
        v.total += d;
      } else {
        ++v.undelivered;
      }
    }
    return v;
  }

  // --- ISL bookkeeping -----------------------------------------------------

  void release(State& s, const EdgeKey& key) const {
    auto it = s.edge_use.find(key);
    if (--it->second == 0) {
      s.edge_use.erase(it);
      --s.degree[static_cast<std::size_t>(key.first)];
      --s.degree[static_cast<std::size_t>(key.second)];
    }
  }

  bool add_edges(State& s, int r, int k) const {
    const auto& a = s.files[static_cast<std::size_t>(r)];
    if (a.serving < 0) return true;
    const auto& sv = serving_of(r, a.serving);
    std::vector<EdgeKey> added;
    for (int o : a.opts) {
      const int via = sv.options[static_cast<std::size_t>(o)].via;
      if (via < 0) continue;
      const auto key = edge_key(sv.sat, via);
      auto it = s.edge_use.find(key);
      if (it != s.edge_use.end()) {
        ++it->second;
      } else {
        if (s.degree[static_cast<std::size_t>(sv.sat)] >= k || s.degree[static_cast<std::size_t>(via)] >= k) {
          for (const auto& k2 : added) release(s, k2);
          return false;
        }
        s.edge_use.emplace(key, 1);
        ++s.degree[static_cast<std::size_t>(key.first)];
        ++s.degree[static_cast<std::size_t>(key.second)];
      }
      added.push_back(key);
    }
    return true;
  }

  void remove_edges(State& s, int r) const {
    const auto& a = s.files[static_cast<std::size_t>(r)];
    if (a.serving < 0) return;
    const auto& sv = serving_of(r, a.serving);
    for (int o : a.opts) {
      const int via = sv.options[static_cast<std::size_t>(o)].via;
      if (via >= 0) release(s, edge_key(sv.sat, via));
    }
  }

  // Whether serving satellite `sat` can add ISLs to all of `vias` on top of s.
  bool edges_feasible(const State& s, int sat, std::vector<int> vias, int k) const {
    std::sort(vias.begin(), vias.end());
    vias.erase(std::unique(vias.begin(), vias.end()), vias.end());
    int fresh = 0;
    for (int via : vias) {
      if (via < 0) continue;
      if (s.edge_use.count(edge_key(sat, via))) continue;
      if (s.degree[static_cast<std::size_t>(via)] >= k) return false;
      ++fresh;
    }
    return fresh == 0 || s.degree[static_cast<std::size_t>(sat)] + fresh <= k;
  }

  // --- delays ----------------------------------------------------------------

  double other_inverse(const Serving& sv, const Option& o, int n) const {
    const double dl = sv.dl_rate_bps / n;
    double inv = 1.0 / dl;
    if (std::isfinite(o.isl_rate_bps)) inv += 1.0 / o.isl_rate_bps;
    return inv;
  }

  double stream_rate(const Serving& sv, const Option& o, double beta, int n) const {
    const double dl = sv.dl_rate_bps / n;
    const double cap = std::min(dl, o.isl_rate_bps);
    if (p_.model == DelayModel::cut_through) {
      return o.gs >= 0 ? std::min(o.feeder.rate(beta), cap) : cap;
    }
    const double serial = other_inverse(sv, o, n);
    if (o.gs < 0) return 1.0 / serial;
    const double u = o.feeder.rate(beta);
    if (u <= 0.0) return 0.0;
    return 1.0 / (1.0 / u + serial);
  }

  std::vector<RatioSource> sources(int r, const Assign& a) const {
    std::vector<RatioSource> out;
    const auto& sv = serving_of(r, a.serving);
    const int n = static_cast<int>(a.opts.size());
    for (std::size_t j = 0; j < a.opts.size(); ++j) {
      const auto& o = sv.options[static_cast<std::size_t>(a.opts[j])];
      out.push_back({o.prop_up_s + sv.dl_prop_s, stream_rate(sv, o, a.beta[j], n)});
    }
    return out;
  }

  double file_delay(int r, const Assign& a) const {
    if (a.serving < 0 || a.opts.empty()) return kInf;
    const auto src = sources(r, a);
    return water_level(src, p_.requests[static_cast<std::size_t>(r)].bits()).delay_s;
  }

  void refresh(State& s, int r) const {
    s.delay[static_cast<std::size_t>(r)] = file_delay(r, s.files[static_cast<std::size_t>(r)]);
  }

  // --- ground-station shares ---------------------------------------------------

  std::vector<std::pair<int, int>> members(const State& s, int g) const {
    std::vector<std::pair<int, int>> out;
    for (int r = 0; r < num_files(); ++r) {
      const auto& a = s.files[static_cast<std::size_t>(r)];
      if (a.serving < 0) continue;
      const auto& sv = serving_of(r, a.serving);
      for (std::size_t j = 0; j < a.opts.size(); ++j) {
        if (sv.options[static_cast<std::size_t>(a.opts[j])].gs == g) out.emplace_back(r, static_cast<int>(j));
      }
    }
    return out;
  }

  std::vector<int> stations_of(int r, const Assign& a) const {
    std::vector<int> out;
    if (a.serving < 0) return out;
    const auto& sv = serving_of(r, a.serving);
    for (int o : a.opts) {
      const int g = sv.options[static_cast<std::size_t>(o)].gs;
      if (g >= 0) out.push_back(g);
    }
    return out;
  }

  void equalize(State& s, int g) const {
    const auto mem = members(s, g);
    if (mem.empty()) return;
    const double share = 1.0 / static_cast<double>(mem.size());
    for (const auto& [r, j] : mem) s.files[static_cast<std::size_t>(r)].beta[static_cast<std::size_t>(j)] = share;
    for (const auto& [r, j] : mem) refresh(s, r);
  }

  ShareDemand demand(const State& s, int r, int j) const {
    const auto& a = s.files[static_cast<std::size_t>(r)];
    const auto& sv = serving_of(r, a.serving);
    const int n = static_cast<int>(a.opts.size());
    ShareDemand d;
    d.bits = p_.requests[static_cast<std::size_t>(r)].bits();
    for (int jj = 0; jj < n; ++jj) {
      if (jj == j) continue;
      const auto& o = sv.options[static_cast<std::size_t>(a.opts[static_cast<std::size_t>(jj)])];
      d.fixed_sources.push_back({o.prop_up_s + sv.dl_prop_s,
                                 stream_rate(sv, o, a.beta[static_cast<std::size_t>(jj)], n)});
    }
    const auto& o = sv.options[static_cast<std::size_t>(a.opts[static_cast<std::size_t>(j)])];
    d.prop_s = o.prop_up_s + sv.dl_prop_s;
    d.feeder = o.feeder;
    d.rate_cap_bps = std::min(sv.dl_rate_bps / n, o.isl_rate_bps);
    d.serial_inverse_rate = other_inverse(sv, o, n);
    return d;
  }

  // One block step: re-optimise station g's shares with everything else
  // fixed. Kept only when the summed delay of g's files does not grow.
  // Returns true on a strict improvement.
  bool optimize_station(State& s, int g) const {
    const auto mem = members(s, g);
    if (mem.empty()) return false;
    std::vector<ShareDemand> demands;
    demands.reserve(mem.size());
    for (const auto& [r, j] : mem) demands.push_back(demand(s, r, j));
    const auto& shares = shares_for(demands);

    Value before;
    Value after;
    std::vector<Assign> trial;
    std::vector<double> new_delay;
    for (std::size_t i = 0; i < mem.size(); ++i) {
      const auto [r, j] = mem[i];
      const double d0 = s.delay[static_cast<std::size_t>(r)];
      if (std::isfinite(d0)) before.total += d0; else ++before.undelivered;
      Assign a = s.files[static_cast<std::size_t>(r)];
      a.beta[static_cast<std::size_t>(j)] = shares[i];
      const double d1 = file_delay(r, a);
      if (std::isfinite(d1)) after.total += d1; else ++after.undelivered;
      trial.push_back(std::move(a));
      new_delay.push_back(d1);
    }
    if (before < after) return false;
    for (std::size_t i = 0; i < mem.size(); ++i) {
      const int r = mem[i].first;
      s.files[static_cast<std::size_t>(r)] = std::move(trial[i]);
      s.delay[static_cast<std::size_t>(r)] = new_delay[i];
    }
    return strictly_better(after, before);
  }

  // Allocations repeat heavily across moves, chain steps and starts; they
  // are cached on the exact bytes of their inputs.
  const std::vector<double>& shares_for(const std::vector<ShareDemand>& demands) const {
    std::string key;
    auto put = [&key](double v) { key.append(reinterpret_cast<const char*>(&v), sizeof v); };
    for (const auto& d : demands) {
      put(d.bits);
      put(d.prop_s);
      put(d.feeder.bandwidth_hz());
      put(d.feeder.full_band_snr());
      put(d.rate_cap_bps);
      put(d.serial_inverse_rate);
      put(static_cast<double>(d.fixed_sources.size()));
      for (const auto& f : d.fixed_sources) {
        put(f.prop_s);
        put(f.rate_bps);
      }
    }
    auto it = share_cache_.find(key);
    if (it == share_cache_.end()) it = share_cache_.emplace(std::move(key), allocate_shares(demands, p_.model)).first;
    return it->second;
  }

  void block_descent(State& s) const {
    for (int sweep = 0; sweep < kMaxBcdSweeps; ++sweep) {
      bool improved = false;
      for (int g = 0; g < p_.num_gs; ++g) improved = optimize_station(s, g) || improved;
      if (!improved) break;
    }
  }

  void equalize_all(State& s) const {
    for (int g = 0; g < p_.num_gs; ++g) equalize(s, g);
    for (int r = 0; r < num_files(); ++r) refresh(s, r);
  }

  // --- moves ------------------------------------------------------------------

  // Puts `a` in place of file r's assignment and re-derives the shares of the
  // stations it touches. False when the ISL limit rules the choice out.
  bool reassign(State& s, int r, Assign a, int k, Policy policy) const {
    auto touched = stations_of(r, s.files[static_cast<std::size_t>(r)]);
    remove_edges(s, r);
    a.beta.assign(a.opts.size(), 0.0);
    s.files[static_cast<std::size_t>(r)] = std::move(a);
    if (!add_edges(s, r, k)) return false;
    const auto fresh = stations_of(r, s.files[static_cast<std::size_t>(r)]);
    touched.insert(touched.end(), fresh.begin(), fresh.end());
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (int g : touched) equalize(s, g);
    refresh(s, r);
    if (policy == Policy::optimize_shares) {
      for (int g : touched) optimize_station(s, g);
    }
    return true;
  }

  double estimate(int r, const Serving& sv, const std::vector<int>& opts,
                  const std::vector<int>& gs_count) const {
    std::vector<RatioSource> src;
    const int n = static_cast<int>(opts.size());
    for (int oi : opts) {
      const auto& o = sv.options[static_cast<std::size_t>(oi)];
      const double beta = o.gs >= 0 ? 1.0 / (gs_count[static_cast<std::size_t>(o.gs)] + 1) : 1.0;
      src.push_back({o.prop_up_s + sv.dl_prop_s, stream_rate(sv, o, beta, n)});
    }
    return water_level(src, p_.requests[static_cast<std::size_t>(r)].bits()).delay_s;
  }

  // Feasible options of serving candidate si ranked by single-stream delay,
  // with the station shares guessed from the current stream counts.
  std::vector<int> ranked_options(const State& s, int r, int si, int k,
                                  const std::vector<int>& gs_count) const {
    const auto& sv = serving_of(r, si);
    std::vector<std::pair<double, int>> ranked;
    for (int o = 0; o < static_cast<int>(sv.options.size()); ++o) {
      const int via = sv.options[static_cast<std::size_t>(o)].via;
      if (via >= 0 && !edges_feasible(s, sv.sat, {via}, k)) continue;
      const double est = estimate(r, sv, {o}, gs_count);
      if (!std::isfinite(est)) continue;
      ranked.emplace_back(est, o);
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<int> out;
    for (const auto& [est, o] : ranked) out.push_back(o);
    return out;
  }

  // Best-ranked option, then further ones while the estimated delay drops.
  std::vector<int> greedy_options(const State& s, int r, int si, int k,
                                  const std::vector<int>& gs_count) const {
    const auto ranked = ranked_options(s, r, si, k, gs_count);
    if (ranked.empty()) return {};
    const auto& sv = serving_of(r, si);
    std::vector<int> chosen{ranked.front()};
    double current = estimate(r, sv, chosen, gs_count);
    for (std::size_t i = 1; i < ranked.size(); ++i) {
      const auto& o = sv.options[static_cast<std::size_t>(ranked[i])];
      const bool clash = o.gs >= 0 && std::any_of(chosen.begin(), chosen.end(), [&](int c) {
        return sv.options[static_cast<std::size_t>(c)].gs == o.gs;
      });
      if (clash) continue;
      std::vector<int> vias;
      for (int c : chosen) vias.push_back(sv.options[static_cast<std::size_t>(c)].via);
      vias.push_back(o.via);
      if (!edges_feasible(s, sv.sat, vias, k)) continue;
      auto trial = chosen;
      trial.push_back(ranked[i]);
      const double est = estimate(r, sv, trial, gs_count);
      if (!(est < current)) break;
      chosen = std::move(trial);
      current = est;
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  }

  std::vector<int> station_counts(const State& s) const {
    std::vector<int> count(static_cast<std::size_t>(p_.num_gs), 0);
    for (int r = 0; r < num_files(); ++r) {
      for (int g : stations_of(r, s.files[static_cast<std::size_t>(r)])) ++count[static_cast<std::size_t>(g)];
    }
    return count;
  }

  // Requests in id order: nearest visible satellite with a usable source,
  // then sources added greedily. Shares start equal.
  State greedy_state(int k) const {
    State s = empty_state();
    std::vector<int> count(static_cast<std::size_t>(p_.num_gs), 0);
    for (int r = 0; r < num_files(); ++r) {
      const auto& cands = p_.serving[static_cast<std::size_t>(r)];
      for (int si = 0; si < static_cast<int>(cands.size()); ++si) {
        auto opts = greedy_options(s, r, si, k, count);
        if (opts.empty()) continue;
        auto& a = s.files[static_cast<std::size_t>(r)];
        a.serving = si;
        a.opts = std::move(opts);
        a.beta.assign(a.opts.size(), 0.0);
        if (!add_edges(s, r, k)) throw std::logic_error("greedy association broke the ISL limit");
        for (int g : stations_of(r, a)) ++count[static_cast<std::size_t>(g)];
        break;
      }
    }
    equalize_all(s);
    return s;
  }

  State local_search(State s, int k, Policy policy) const {
    Value current = value(s);
    for (int pass = 0; pass < p_.max_passes; ++pass) {
      bool improved = false;
      for (int r = 0; r < num_files(); ++r) {
        std::optional<State> best;
        Value best_value = current;
        auto consider = [&](Assign a) {
          State t = s;
          if (!reassign(t, r, std::move(a), k, policy)) return;
          const Value v = value(t);
          if (strictly_better(v, best_value)) {
            best_value = v;
            best = std::move(t);
          }
        };
        const Assign cur = s.files[static_cast<std::size_t>(r)];

        if (cur.serving >= 0) {
          const auto& sv = serving_of(r, cur.serving);
          const int n_opts = static_cast<int>(sv.options.size());
          auto gs_at = [&](int o) { return sv.options[static_cast<std::size_t>(o)].gs; };
          for (int o = 0; o < n_opts; ++o) {
            if (std::binary_search(cur.opts.begin(), cur.opts.end(), o)) continue;
            const int g = gs_at(o);
            int clash = -1;
            for (std::size_t j = 0; j < cur.opts.size(); ++j) {
              if (g >= 0 && gs_at(cur.opts[j]) == g) clash = static_cast<int>(j);
            }
            if (clash < 0) {
              Assign a{cur.serving, cur.opts, {}};
              a.opts.insert(std::upper_bound(a.opts.begin(), a.opts.end(), o), o);
              consider(std::move(a));
            }
            for (std::size_t j = 0; j < cur.opts.size(); ++j) {
              if (clash >= 0 && clash != static_cast<int>(j)) continue;
              Assign a{cur.serving, cur.opts, {}};
              a.opts[j] = o;
              std::sort(a.opts.begin(), a.opts.end());
              consider(std::move(a));
            }
          }
          if (cur.opts.size() >= 2) {
            for (std::size_t j = 0; j < cur.opts.size(); ++j) {
              Assign a{cur.serving, cur.opts, {}};
              a.opts.erase(a.opts.begin() + static_cast<std::ptrdiff_t>(j));
              consider(std::move(a));
            }
          }
        }

        // Serving-satellite moves, judged against the slot without file r.
        State base = s;
        remove_edges(base, r);
        base.files[static_cast<std::size_t>(r)] = Assign{};
        const auto count = station_counts(base);
        const int n_cands = static_cast<int>(p_.serving[static_cast<std::size_t>(r)].size());
        for (int si = 0; si < n_cands; ++si) {
          auto mask = greedy_options(base, r, si, k, count);
          if (!mask.empty()) {
            Assign a{si, std::move(mask), {}};
            if (!a.same_choice(cur)) consider(std::move(a));
          }
          const auto ranked = ranked_options(base, r, si, k, count);
          for (std::size_t i = 0; i < ranked.size() && i < kSingletonMoves; ++i) {
            Assign a{si, {ranked[i]}, {}};
            if (!a.same_choice(cur)) consider(std::move(a));
          }
        }

        if (best) {
          s = std::move(*best);
          current = best_value;
          improved = true;
        }
      }
      if (!improved) break;
    }
    return s;
  }

  // Local search and block descent alternated until neither helps.
  State polish(State s, int k) const {
    for (int round = 0; round < kMaxFullRounds; ++round) {
      s = local_search(std::move(s), k, Policy::optimize_shares);
      const Value before = value(s);
      block_descent(s);
      if (!strictly_better(value(s), before)) break;
    }
    return s;
  }

  State with_descent(State s) const {
    block_descent(s);
    return s;
  }

  DeliveryPlan to_plan(const State& s) const {
    DeliveryPlan plan;
    for (int r = 0; r < num_files(); ++r) {
      const auto& req = p_.requests[static_cast<std::size_t>(r)];
      const auto& a = s.files[static_cast<std::size_t>(r)];
      FilePlan f;
      f.request_id = req.request_id;
      f.aircraft = req.aircraft;
      f.cached = req.cached;
      const double d = s.delay[static_cast<std::size_t>(r)];
      if (std::isfinite(d)) {
        const auto& sv = serving_of(r, a.serving);
        f.delivered = true;
        f.serving_sat = sv.sat;
        f.delay_s = d;
        const auto src = sources(r, a);
        const auto sol = optimal_ratio_delay(src, req.bits());
        for (std::size_t j = 0; j < a.opts.size(); ++j) {
          // A station stream left without bandwidth carries nothing.
          if (!(src[j].rate_bps > 0.0)) continue;
          const auto& o = sv.options[static_cast<std::size_t>(a.opts[j])];
          StreamPlan st;
          st.kind = o.kind;
          st.source_sat = o.via >= 0 ? o.via : sv.sat;
          st.gs = o.gs;
          st.via_isl = o.via >= 0;
          st.prop_s = src[j].prop_s;
          st.rate_bps = src[j].rate_bps;
          st.ratio = sol.ratios[j];
          st.bandwidth_share = o.gs >= 0 ? a.beta[j] : 0.0;
          f.streams.push_back(st);
        }
        ++plan.delivered;
        plan.total_delay_s += d;
      } else {
        ++plan.undelivered;
      }
      plan.files.push_back(std::move(f));
    }
    for (const auto& [key, uses] : s.edge_use) plan.activated_isls.push_back(key);
    plan.average_delay_s = plan.delivered > 0 ? plan.total_delay_s / plan.delivered : 0.0;
    return plan;
  }

 private:
  const Problem& p_;
  mutable std::unordered_map<std::string, std::vector<double>> share_cache_;
};

int clamp_limit(int max_isls) {
  if (max_isls < 0) throw std::invalid_argument("max_isls must be >= 0");
  return max_isls;
}

struct Chain {
  std::vector<State> greedy;
  std::vector<State> equal;
  std::vector<State> optimized;
  State full;
};

State best_of(const Planner& pl, std::vector<State> candidates) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (pl.value(candidates[i]) < pl.value(candidates[best])) best = i;
  }
  return std::move(candidates[best]);
}

void run_chain(const Planner& pl, Chain& c, int limit) {
  c.optimized.assign(static_cast<std::size_t>(limit) + 1, State{});
  const int full_degree = c.full.max_degree();
  for (int k = 0; k <= limit; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    std::vector<State> starts;
    if (k > 0) starts.push_back(c.optimized[ku - 1]);
    starts.push_back(c.greedy[ku]);
    starts.push_back(pl.with_descent(c.equal[ku]));
    if (full_degree <= k) starts.push_back(c.full);

    std::vector<State> candidates{c.equal[ku]};
    std::vector<const State*> polished_from;
    for (const auto& st : starts) {
      const bool repeat = std::any_of(polished_from.begin(), polished_from.end(), [&](const State* o) {
        for (std::size_t r = 0; r < st.files.size(); ++r) {
          if (!st.files[r].same_choice(o->files[r])) return false;
        }
        return !(pl.value(st) < pl.value(*o));
      });
      candidates.push_back(st);
      if (repeat) continue;
      polished_from.push_back(&st);
      candidates.push_back(pl.polish(st, k));
    }
    c.optimized[ku] = best_of(pl, std::move(candidates));
  }
}

Chain solve_chain(const Problem& p, int limit) {
  Planner pl(p);
  Chain c;
  for (int k = 0; k <= limit; ++k) {
    State g = pl.greedy_state(k);
    c.equal.push_back(pl.local_search(g, k, Policy::equal_shares));
    c.greedy.push_back(pl.with_descent(std::move(g)));
  }
  {
    State g = pl.greedy_state(kUnlimitedIsls);
    State e = pl.local_search(g, kUnlimitedIsls, Policy::equal_shares);
    g = pl.with_descent(std::move(g));
    e = pl.with_descent(std::move(e));
    std::vector<State> cands{g, e, pl.polish(g, kUnlimitedIsls), pl.polish(e, kUnlimitedIsls)};
    c.full = best_of(pl, std::move(cands));
  }
  for (int round = 0;; ++round) {
    run_chain(pl, c, limit);
    if (round == kMaxFullRounds) break;
    State start = pl.value(c.optimized.back()) < pl.value(c.full) ? c.optimized.back() : c.full;
    State next = best_of(pl, {start, pl.polish(start, kUnlimitedIsls)});
    if (!(pl.value(next) < pl.value(c.full))) break;
    c.full = std::move(next);
  }
  return c;
}

}  // namespace

const DeliveryPlan& SlotSolution::plan(int max_isls, PlanMode mode) const {
  if (mode == PlanMode::fully_connected) return fully_connected;
  if (max_isls < 0 || max_isls > chain_length)
    throw std::out_of_range("max_isls " + std::to_string(max_isls) + " outside the solved chain");
  const auto k = static_cast<std::size_t>(max_isls);
  switch (mode) {
    case PlanMode::optimized: return optimized[k];
    case PlanMode::greedy: return greedy[k];
    case PlanMode::equal_bandwidth: return equal_bandwidth[k];
    case PlanMode::fully_connected: break;
  }
  return fully_connected;
}

SlotSolution solve_slot(std::span<const FileRequest> requests, const SlotNetwork& network,
                        int max_isls, const IfcSettings& settings) {
  const int limit = std::max(clamp_limit(max_isls), settings.sweep_max_isls);
  const Problem p = make_problem(requests, network, settings);
  const Planner pl(p);
  const Chain c = solve_chain(p, limit);
  SlotSolution out;
  out.chain_length = limit;
  for (int k = 0; k <= limit; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    out.optimized.push_back(pl.to_plan(c.optimized[ku]));
    out.greedy.push_back(pl.to_plan(c.greedy[ku]));
    out.equal_bandwidth.push_back(pl.to_plan(c.equal[ku]));
  }
  out.fully_connected = pl.to_plan(c.full);
  return out;
}

DeliveryPlan plan_requests(std::span<const FileRequest> requests, const SlotNetwork& network,
                           int max_isls, PlanMode mode, const IfcSettings& settings) {
  const int k = clamp_limit(max_isls);
  if (mode == PlanMode::greedy || mode == PlanMode::equal_bandwidth) {
    const Problem p = make_problem(requests, network, settings);
    const Planner pl(p);
    State g = pl.greedy_state(k);
    if (mode == PlanMode::greedy) return pl.to_plan(pl.with_descent(std::move(g)));
    return pl.to_plan(pl.local_search(std::move(g), k, Policy::equal_shares));
  }
  return solve_slot(requests, network, k, settings).plan(k, mode);
}

DeliveryPlan plan_non_cached(std::span<const FileRequest> requests, const SlotNetwork& network,
                             int max_isls, PlanMode mode, const IfcSettings& settings) {
  for (const auto& r : requests) {
    if (r.cached) throw std::invalid_argument("plan_non_cached: request " + std::to_string(r.request_id) + " is cached");
  }
  return plan_requests(requests, network, max_isls, mode, settings);
}

}  // namespace leoisl::ifc
