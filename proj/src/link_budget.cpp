#include "leoisl/link_budget.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "leoisl/orbital.hpp"

namespace leoisl {

std::string_view to_string(LinkClass cls) {
  switch (cls) {
    case LinkClass::sat_to_air: return "sat_to_air";
    case LinkClass::ground_to_air: return "ground_to_air";
    case LinkClass::ground_to_sat: return "ground_to_sat";
    case LinkClass::isl_laser: return "isl_laser";
  }
  return "unknown";
}

LinkClass link_class_from_string(std::string_view name) {
  for (auto cls : {LinkClass::sat_to_air, LinkClass::ground_to_air, LinkClass::ground_to_sat,
                   LinkClass::isl_laser}) {
    if (to_string(cls) == name) return cls;
  }
  throw std::invalid_argument("unknown link class '" + std::string(name) + "'");
}

void LinkBudgetParams::validate() const {
  if (!(tx_power_w > 0.0)) throw std::invalid_argument("tx_power_w: must be > 0");
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth_hz: must be > 0");
  if (!(carrier_hz > 0.0)) throw std::invalid_argument("carrier_hz: must be > 0");
  if (!(noise_temperature_k > 0.0)) throw std::invalid_argument("noise_temperature_k: must be > 0");
  if (link_class == LinkClass::isl_laser && !(lisl_fixed_rate_bps > 0.0)) {
    throw std::invalid_argument("lisl_fixed_rate_bps: must be > 0 for isl_laser");
  }
}

LinkBudgetParams LinkBudgetParams::defaults(LinkClass cls) {
  // Satellite 5 W / 40 dB, GS 10 W / 52 dB, aircraft 30 dB; 100 MHz channels.
  switch (cls) {
    case LinkClass::sat_to_air: return {cls, 5.0, 40.0, 30.0, 15e9, 100e6, 290.0, 0.0};
    case LinkClass::ground_to_air: return {cls, 10.0, 52.0, 30.0, 18e9, 100e6, 290.0, 0.0};
    case LinkClass::ground_to_sat: return {cls, 10.0, 52.0, 40.0, 30e9, 100e6, 290.0, 0.0};
    case LinkClass::isl_laser: return {cls, 5.0, 40.0, 40.0, 197e12, 100e6, 290.0, 10e9};
  }
  throw std::invalid_argument("unknown link class");
}

const LinkBudgetParams& LinkBudgetSet::operator[](LinkClass cls) const {
  switch (cls) {
    case LinkClass::sat_to_air: return sat_to_air;
    case LinkClass::ground_to_air: return ground_to_air;
    case LinkClass::ground_to_sat: return ground_to_sat;
    case LinkClass::isl_laser: return isl_laser;
  }
  throw std::invalid_argument("unknown link class");
}

LinkBudgetParams& LinkBudgetSet::operator[](LinkClass cls) {
  return const_cast<LinkBudgetParams&>(std::as_const(*this)[cls]);
}

double fspl_db(double distance_km, double carrier_hz) {
  if (!(distance_km > 0.0)) throw std::invalid_argument("fspl_db: distance must be > 0");
  if (!(carrier_hz > 0.0)) throw std::invalid_argument("fspl_db: carrier must be > 0");
  return 92.45 + 20.0 * std::log10(carrier_hz / 1e9) + 20.0 * std::log10(distance_km);
}

double snr_linear(const LinkBudgetParams& params, double distance_km) {
  const double eirp_dbw = 10.0 * std::log10(params.tx_power_w) + params.tx_gain_db;
  const double rx_dbw = eirp_dbw + params.rx_gain_db - fspl_db(distance_km, params.carrier_hz);
  const double noise_dbw =
      10.0 * std::log10(kBoltzmann * params.noise_temperature_k * params.bandwidth_hz);
  return std::pow(10.0, (rx_dbw - noise_dbw) / 10.0);
}

double capacity_bps(const LinkBudgetParams& params, double distance_km, double bandwidth_share) {
  if (!(bandwidth_share > 0.0) || bandwidth_share > 1.0) {
    throw std::invalid_argument("capacity_bps: bandwidth_share must lie in (0, 1]");
  }
  if (!(distance_km > 0.0)) throw std::invalid_argument("capacity_bps: distance must be > 0");
  if (params.link_class == LinkClass::isl_laser) return params.lisl_fixed_rate_bps;
  return ShannonChannel(params, distance_km).rate(bandwidth_share);
}

double propagation_delay_s(double distance_km) {
  if (distance_km < 0.0) throw std::invalid_argument("propagation_delay_s: distance must be >= 0");
  return distance_km / kSpeedOfLightKmS;
}

ShannonChannel::ShannonChannel(double bandwidth_hz, double full_band_snr)
    : bandwidth_hz_(bandwidth_hz), snr_(full_band_snr) {}

ShannonChannel::ShannonChannel(const LinkBudgetParams& params, double distance_km)
    : bandwidth_hz_(params.bandwidth_hz), snr_(snr_linear(params, distance_km)) {}

double ShannonChannel::rate(double share) const {
  if (share <= 0.0) return 0.0;
  return share * bandwidth_hz_ * std::log2(1.0 + snr_ / share);
}

double ShannonChannel::rate_derivative(double share) const {
  if (share <= 0.0) return std::numeric_limits<double>::infinity();
  const double q = snr_ / share;
  return bandwidth_hz_ * (std::log2(1.0 + q) - q / ((1.0 + q) * std::numbers::ln2));
}

double ShannonChannel::share_for_rate(double target_bps) const {
  if (target_bps <= 0.0) return 0.0;
  if (rate(1.0) <= target_bps) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    (rate(mid) >= target_bps ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace leoisl
