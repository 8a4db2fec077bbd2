#include "leoisl/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include <boost/math/tools/roots.hpp>

namespace leoisl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A demand with its fixed sources pre-sorted, so the water level with the
// share-dependent stream added can be found by one merge pass.
struct Prepared {
  const ShareDemand* d;
  std::vector<RatioSource> fixed;  // positive rate, by (prop, input order)
  double delay_without;
};

Prepared prepare(const ShareDemand& d) {
  Prepared p{&d, {}, kInf};
  for (const auto& s : d.fixed_sources) {
    if (s.rate_bps > 0.0) p.fixed.push_back(s);
  }
  std::stable_sort(p.fixed.begin(), p.fixed.end(),
                   [](const RatioSource& a, const RatioSource& b) { return a.prop_s < b.prop_s; });
  p.delay_without = water_level(p.fixed, d.bits).delay_s;
  return p;
}

// Same fill as water_level over fixed + {extra}, extra ordered last among ties.
WaterLevel level_with(const Prepared& p, RatioSource extra) {
  const double bits = p.d->bits;
  const bool use_extra = extra.rate_bps > 0.0;
  const std::size_t n = p.fixed.size() + (use_extra ? 1 : 0);
  if (n == 0) return {kInf, 0.0};
  std::size_t fi = 0;
  bool extra_done = !use_extra;
  auto next = [&]() -> RatioSource {
    if (!extra_done && (fi == p.fixed.size() || extra.prop_s < p.fixed[fi].prop_s)) {
      extra_done = true;
      return extra;
    }
    return p.fixed[fi++];
  };
  if (bits == 0.0) {
    const RatioSource s = next();
    return {s.prop_s, s.rate_bps};
  }
  double rate_sum = 0.0;
  double weighted = 0.0;
  double level = kInf;
  double base = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const RatioSource s = next();
    if (j == 0) base = s.prop_s;
    if (j > 0 && level <= s.prop_s) break;
    rate_sum += s.rate_bps;
    weighted += (s.prop_s - base) * s.rate_bps;
    level = base + (bits + weighted) / rate_sum;
  }
  return {level, rate_sum};
}

double gain(const Prepared& p, double share, DelayModel model) {
  const ShareDemand& d = *p.d;
  const double u = d.feeder.rate(share);
  double drate;
  if (model == DelayModel::cut_through) {
    if (u >= d.rate_cap_bps) return 0.0;
    drate = d.feeder.rate_derivative(share);
  } else {
    if (u <= 0.0) return kInf;
    const double r = 1.0 / (1.0 / u + d.serial_inverse_rate);
    drate = d.feeder.rate_derivative(share) * (r / u) * (r / u);
  }
  const auto lv = level_with(p, {d.prop_s, share_rate(d, share, model)});
  if (!(d.prop_s < lv.delay_s) || lv.active_rate_bps <= 0.0) return 0.0;
  return (lv.delay_s - d.prop_s) / lv.active_rate_bps * drate;
}

// Shares below this are treated as zero bandwidth.
constexpr double kMinShare = 1e-300;

// The water level is the minimum over prefixes of the source order of
// (bits + sum p r) / sum r. With the share stream fixed in that order, each
// prefix containing it gives a delay (A + p r(s)) / (B + r(s)) that is convex
// in s, but the minimum over prefixes is not. A Piece is one such prefix.
struct Piece {
  const ShareDemand* d;
  double a;  // bits + sum p r over the fixed sources in the prefix
  double b;  // sum r over the same sources
};

double rate_derivative(const ShareDemand& d, double share, DelayModel model) {
  const double u = d.feeder.rate(share);
  if (model == DelayModel::cut_through) return u >= d.rate_cap_bps ? 0.0 : d.feeder.rate_derivative(share);
  if (u <= 0.0) return kInf;
  const double r = 1.0 / (1.0 / u + d.serial_inverse_rate);
  return d.feeder.rate_derivative(share) * (r / u) * (r / u);
}

double piece_gain(const Piece& pc, double share, DelayModel model) {
  const double lead = pc.a - pc.d->prop_s * pc.b;
  if (lead <= 0.0) return 0.0;
  const double total = pc.b + share_rate(*pc.d, share, model);
  if (total <= 0.0) return kInf;
  return lead / (total * total) * rate_derivative(*pc.d, share, model);
}

double response(const Piece& pc, double lambda, DelayModel model) {
  if (pc.a - pc.d->prop_s * pc.b <= 0.0) return 0.0;
  if (piece_gain(pc, 1.0, model) >= lambda) return 1.0;
  double lo = 0.5;
  while (lo > kMinShare && piece_gain(pc, lo, model) <= lambda) lo *= 0.5;
  if (lo <= kMinShare) return 0.0;
  auto f = [&](double s) { return piece_gain(pc, s, model) - lambda; };
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, std::min(1.0, 2.0 * lo), boost::math::tools::eps_tolerance<double>(48), iters);
  return 0.5 * (a + b);
}

double saturation_share(const Piece& pc, DelayModel model) {
  if (pc.a - pc.d->prop_s * pc.b <= 0.0) return 0.0;
  if (model == DelayModel::store_and_forward) return 1.0;
  return pc.d->feeder.share_for_rate(pc.d->rate_cap_bps);
}

// KKT solution for one choice of prefix per demand (convex problem).
std::vector<double> solve_pieces(std::span<const Piece> pieces, DelayModel model) {
  const std::size_t n = pieces.size();
  std::vector<double> shares(n, 0.0);
  std::vector<double> saturation(n);
  for (std::size_t i = 0; i < n; ++i) saturation[i] = saturation_share(pieces[i], model);
  const double sat_sum = std::accumulate(saturation.begin(), saturation.end(), 0.0);
  if (sat_sum <= 1.0) {
    if (sat_sum <= 0.0) {
      shares.assign(n, 1.0 / static_cast<double>(n));
    } else {
      for (std::size_t i = 0; i < n; ++i) shares[i] = saturation[i] / sat_sum;
    }
    return shares;
  }

  auto total_at = [&](double log_lambda) {
    const double lambda = std::exp(log_lambda);
    double sum = 0.0;
    for (const auto& pc : pieces) sum += response(pc, lambda, model);
    return sum;
  };
  // Bracket the multiplier in log space.
  double lo = 0.0;
  {
    double probe = 0.0;
    for (const auto& pc : pieces) probe = std::max(probe, piece_gain(pc, 1.0 / n, model));
    lo = std::log(std::max(probe, 1e-300));
  }
  double hi = lo;
  while (total_at(lo) < 1.0 && lo > -700.0) lo -= 2.0;
  while (total_at(hi) > 1.0 && hi < 700.0) hi += 2.0;
  if (total_at(hi) > 1.0 || total_at(lo) < 1.0) {
    // Degenerate bracket; fall back to saturation-proportional shares.
    for (std::size_t i = 0; i < n; ++i) shares[i] = saturation[i] / sat_sum;
    return shares;
  }
  auto f = [&](double t) { return total_at(t) - 1.0; };
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  // The upper end of the bracket keeps the total at or below 1.
  const double lambda = std::exp(f(b) <= 0.0 ? b : a);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    shares[i] = response(pieces[i], lambda, model);
    sum += shares[i];
  }
  if (sum > 1.0) {
    for (auto& s : shares) s /= sum;
  }
  return shares;
}

// Candidate prefixes for one demand: every fixed source arriving no later
// than the share stream, then zero or more of the later ones. A later source
// that arrives after the level reached without it can only raise the level,
// and so can every source after it.
std::vector<Piece> pieces_for(const Prepared& p, DelayModel model) {
  const ShareDemand& d = *p.d;
  Piece pc{&d, d.bits, 0.0};
  std::size_t j = 0;
  for (; j < p.fixed.size() && p.fixed[j].prop_s <= d.prop_s; ++j) {
    pc.a += p.fixed[j].prop_s * p.fixed[j].rate_bps;
    pc.b += p.fixed[j].rate_bps;
  }
  std::vector<Piece> out{pc};
  for (; j < p.fixed.size(); ++j) {
    if (pc.b > 0.0 && p.fixed[j].prop_s >= pc.a / pc.b) break;
    pc.a += p.fixed[j].prop_s * p.fixed[j].rate_bps;
    pc.b += p.fixed[j].rate_bps;
    out.push_back(pc);
  }
  // The level falls as the share grows, so the active prefix only shrinks:
  // prefixes shorter than the one active at full share never attain the min.
  const double r = share_rate(d, 1.0, model);
  std::size_t first = 0;
  double low = kInf;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double level = out[k].b + r > 0.0 ? (out[k].a + d.prop_s * r) / (out[k].b + r) : kInf;
    if (level < low) {
      low = level;
      first = k;
    }
  }
  out.erase(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(first));
  return out;
}

// Above this many prefix combinations the choice is refined iteratively
// instead of enumerated.
constexpr std::size_t kMaxCombinations = 512;

}  // namespace

double share_rate(const ShareDemand& d, double share, DelayModel model) {
  const double u = d.feeder.rate(share);
  if (u <= 0.0) return 0.0;
  if (model == DelayModel::cut_through) return std::min(u, d.rate_cap_bps);
  return 1.0 / (1.0 / u + d.serial_inverse_rate);
}

double demand_delay(const ShareDemand& d, double share, DelayModel model) {
  std::vector<RatioSource> sources = d.fixed_sources;
  sources.push_back({d.prop_s, share_rate(d, share, model)});
  return water_level(sources, d.bits).delay_s;
}

double marginal_gain(const ShareDemand& d, double share, DelayModel model) {
  return gain(prepare(d), share, model);
}

std::vector<double> allocate_shares(std::span<const ShareDemand> demands, DelayModel model) {
  const std::size_t n = demands.size();
  if (n == 0) return {};

  std::vector<std::vector<Piece>> options;
  options.reserve(n);
  std::size_t combinations = 1;
  for (const auto& d : demands) {
    options.push_back(pieces_for(prepare(d), model));
    combinations = std::min(combinations * options.back().size(), kMaxCombinations + 1);
  }
  auto objective = [&](const std::vector<double>& shares) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += demand_delay(demands[i], shares[i], model);
    return total;
  };

  std::vector<double> best;
  double best_total = kInf;
  std::vector<std::size_t> pick(n, 0);
  std::vector<Piece> chosen(n);
  auto try_pick = [&]() {
    for (std::size_t i = 0; i < n; ++i) chosen[i] = options[i][pick[i]];
    auto shares = solve_pieces(chosen, model);
    const double total = objective(shares);
    if (best.empty() || total < best_total) {
      best_total = total;
      best = shares;
    }
    return shares;
  };

  if (combinations <= kMaxCombinations) {
    for (;;) {
      try_pick();
      std::size_t i = 0;
      while (i < n && ++pick[i] == options[i].size()) pick[i++] = 0;
      if (i == n) break;
    }
    return best;
  }

  // Start from the longest prefixes and move each demand to the prefix that
  // is active at the current shares until nothing changes.
  for (std::size_t i = 0; i < n; ++i) pick[i] = options[i].size() - 1;
  for (int round = 0; round < 16; ++round) {
    const auto shares = try_pick();
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t arg = pick[i];
      double low = kInf;
      for (std::size_t k = 0; k < options[i].size(); ++k) {
        const Piece& pc = options[i][k];
        const double r = share_rate(*pc.d, shares[i], model);
        const double level = pc.b + r > 0.0 ? (pc.a + pc.d->prop_s * r) / (pc.b + r) : kInf;
        if (level < low) {
          low = level;
          arg = k;
        }
      }
      changed = changed || arg != pick[i];
      pick[i] = arg;
    }
    if (!changed) break;
  }
  return best;
}

}  // namespace leoisl
