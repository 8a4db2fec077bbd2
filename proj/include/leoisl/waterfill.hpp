#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "leoisl/routing.hpp"

namespace leoisl {

/// cut_through: propagation summed over hops plus one transmission at the
/// bottleneck. store_and_forward: every hop pays its own transmission time.
enum class DelayModel { cut_through, store_and_forward };

std::string_view to_string(DelayModel model);
DelayModel delay_model_from_string(std::string_view name);

/// Delay of `bits` over a path; +inf when a hop has zero capacity.
double stream_delay(const Path& path, double bits, DelayModel model = DelayModel::cut_through);

/// Effective end-to-end rate of a chain of hops under the delay model.
double chain_rate(std::span<const double> hop_rates_bps, DelayModel model);

struct RatioSource {
  double prop_s = 0.0;
  double rate_bps = 0.0;
};

struct RatioSolution {
  double delay_s = 0.0;
  std::vector<double> ratios;  // one per input source, 0 for unused ones
};

/// Minimum-delay split of `total_bits` over parallel sources, each delivering
/// its part x_c * bits after prop_c + x_c * bits / rate_c. The optimum fills
/// the fastest-arriving sources first: D solves
/// sum_c max(0, D - prop_c) * rate_c = bits, and every used source finishes at D.
/// Sources with zero rate are ignored; with none left the delay is +inf.
RatioSolution optimal_ratio_delay(std::span<const RatioSource> sources, double total_bits);

/// Same delay without materialising the ratios; also reports the summed rate
/// of the active sources, used for marginal-delay computations.
struct WaterLevel {
  double delay_s;
  double active_rate_bps;
};
WaterLevel water_level(std::span<const RatioSource> sources, double total_bits);

}  // namespace leoisl
