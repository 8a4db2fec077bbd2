#pragma once

#include <span>
#include <vector>

#include "leoisl/link_budget.hpp"
#include "leoisl/waterfill.hpp"

namespace leoisl {

/// One file's claim on a ground station's feeder channel. The file may have
/// other parallel streams (fixed_sources) whose rates do not depend on this
/// ground station. The stream through this station crosses the feeder (rate
/// depends on the share) and further hops summarised by rate_cap_bps
/// (cut-through bottleneck) or serial_inverse_rate (sum of 1/rate over the
/// other hops, store-and-forward).
struct ShareDemand {
  double bits = 0.0;
  std::vector<RatioSource> fixed_sources;
  double prop_s = 0.0;
  ShannonChannel feeder;
  double rate_cap_bps = 0.0;
  double serial_inverse_rate = 0.0;
};

double share_rate(const ShareDemand& demand, double share, DelayModel model);

/// File delay when the stream through this station gets `share` of its band.
double demand_delay(const ShareDemand& demand, double share, DelayModel model);

/// -d delay / d share (one-sided from the right at kinks).
double marginal_gain(const ShareDemand& demand, double share, DelayModel model);

/// Shares (sum <= 1) minimising the summed delay of all demands at one
/// station. A file's delay is the minimum over active source sets of a
/// convex function of its share; for each choice of active sets the optimum
/// equalises marginal gains (multiplier found by bracketing root search), and
/// the best choice wins. Bandwidth left over once every stream is saturated
/// is spread in proportion to the saturation shares.
std::vector<double> allocate_shares(std::span<const ShareDemand> demands, DelayModel model);

}  // namespace leoisl
