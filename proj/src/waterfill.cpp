#include "leoisl/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace leoisl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_sources(std::span<const RatioSource> sources, double bits) {
  if (!(bits >= 0.0) || !std::isfinite(bits)) {
    throw std::invalid_argument("optimal_ratio_delay: bits must be finite and >= 0");
  }
  for (const auto& s : sources) {
    if (!(s.rate_bps >= 0.0) || !std::isfinite(s.rate_bps) || !(s.prop_s >= 0.0) ||
        !std::isfinite(s.prop_s)) {
      throw std::invalid_argument("optimal_ratio_delay: rates and delays must be finite and >= 0");
    }
  }
}

// Indices of positive-rate sources ordered by (prop, index). Small inputs,
// the common case, stay off the heap.
class Order {
 public:
  explicit Order(std::span<const RatioSource> sources) {
    if (sources.size() > kInline) heap_.reserve(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i) {
      if (!(sources[i].rate_bps > 0.0)) continue;
      if (sources.size() > kInline) {
        heap_.push_back(i);
      } else {
        inline_[size_] = i;
      }
      ++size_;
    }
    std::size_t* first = data();
    auto less = [&](std::size_t a, std::size_t b) {
      return sources[a].prop_s != sources[b].prop_s ? sources[a].prop_s < sources[b].prop_s : a < b;
    };
    if (size_ <= kInline) {
      for (std::size_t i = 1; i < size_; ++i) {
        const std::size_t v = first[i];
        std::size_t j = i;
        while (j > 0 && less(v, first[j - 1])) {
          first[j] = first[j - 1];
          --j;
        }
        first[j] = v;
      }
    } else {
      std::sort(first, first + size_, less);
    }
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::size_t operator[](std::size_t i) const { return data()[i]; }
  std::size_t front() const { return data()[0]; }

 private:
  static constexpr std::size_t kInline = 16;
  std::size_t* data() { return heap_.empty() ? inline_ : heap_.data(); }
  const std::size_t* data() const { return heap_.empty() ? inline_ : heap_.data(); }

  std::size_t inline_[kInline] = {};
  std::vector<std::size_t> heap_;
  std::size_t size_ = 0;
};

struct Level {
  double delay;
  double rate;
  std::size_t active;  // prefix length of the order
};

Level fill(std::span<const RatioSource> sources, const Order& order, double bits) {
  if (order.empty()) return {kInf, 0.0, 0};
  if (bits == 0.0) return {sources[order.front()].prop_s, sources[order.front()].rate_bps, 1};
  // Offsets from the earliest arrival keep the level well conditioned; with a
  // single source it is exactly p + bits / r.
  const double base = sources[order.front()].prop_s;
  double rate_sum = 0.0;
  double weighted = 0.0;
  double level = kInf;
  std::size_t j = 0;
  while (j < order.size()) {
    const auto& s = sources[order[j]];
    if (j > 0 && level <= s.prop_s) break;
    rate_sum += s.rate_bps;
    weighted += (s.prop_s - base) * s.rate_bps;
    level = base + (bits + weighted) / rate_sum;
    ++j;
  }
  return {level, rate_sum, j};
}

}  // namespace

std::string_view to_string(DelayModel model) {
  return model == DelayModel::cut_through ? "cut_through" : "store_and_forward";
}

DelayModel delay_model_from_string(std::string_view name) {
  if (name == "cut_through") return DelayModel::cut_through;
  if (name == "store_and_forward") return DelayModel::store_and_forward;
  throw std::invalid_argument("unknown delay model '" + std::string(name) + "'");
}

double chain_rate(std::span<const double> hop_rates_bps, DelayModel model) {
  if (hop_rates_bps.empty()) return kInf;
  if (model == DelayModel::cut_through) {
    return *std::min_element(hop_rates_bps.begin(), hop_rates_bps.end());
  }
  double inverse = 0.0;
  for (double r : hop_rates_bps) {
    if (r <= 0.0) return 0.0;
    inverse += 1.0 / r;
  }
  return 1.0 / inverse;
}

double stream_delay(const Path& path, double bits, DelayModel model) {
  if (bits < 0.0) throw std::invalid_argument("stream_delay: bits must be >= 0");
  if (path.hop_count == 0 || bits == 0.0) return path.total_propagation_delay_s;
  const double rate = chain_rate(path.hop_capacities_bps, model);
  if (rate <= 0.0) return kInf;
  return path.total_propagation_delay_s + bits / rate;
}

RatioSolution optimal_ratio_delay(std::span<const RatioSource> sources, double total_bits) {
  check_sources(sources, total_bits);
  RatioSolution out;
  out.ratios.assign(sources.size(), 0.0);
  const Order order(sources);
  const Level lv = fill(sources, order, total_bits);
  out.delay_s = lv.delay;
  if (lv.active == 0) return out;
  if (total_bits == 0.0) {
    out.ratios[order.front()] = 1.0;
    return out;
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < lv.active; ++j) {
    const auto& s = sources[order[j]];
    const double x = std::max(0.0, (lv.delay - s.prop_s) * s.rate_bps);
    out.ratios[order[j]] = x;
    sum += x;
  }
  // Normalise rather than divide by bits: the per-source amounts carry the
  // cancellation error of D - p, and the ratios must still sum to one.
  for (std::size_t j = 0; j < lv.active; ++j) out.ratios[order[j]] /= sum;
  return out;
}

WaterLevel water_level(std::span<const RatioSource> sources, double total_bits) {
  const Order order(sources);
  const Level lv = fill(sources, order, total_bits);
  return {lv.delay, lv.rate};
}

}  // namespace leoisl
