#pragma once

#include <string_view>

namespace leoisl {

enum class LinkClass { sat_to_air, ground_to_air, ground_to_sat, isl_laser };

std::string_view to_string(LinkClass cls);
LinkClass link_class_from_string(std::string_view name);

inline constexpr double kBoltzmann = 1.380649e-23;

struct LinkBudgetParams {
  LinkClass link_class = LinkClass::sat_to_air;
  double tx_power_w = 5.0;
  double tx_gain_db = 40.0;
  double rx_gain_db = 30.0;
  double carrier_hz = 15e9;
  double bandwidth_hz = 100e6;
  double noise_temperature_k = 290.0;
  double lisl_fixed_rate_bps = 0.0;  // isl_laser only

  void validate() const;
  bool operator==(const LinkBudgetParams&) const = default;

  /// In-flight-connectivity defaults for each class.
  static LinkBudgetParams defaults(LinkClass cls);
};

/// One parameter block per link class.
struct LinkBudgetSet {
  LinkBudgetParams sat_to_air = LinkBudgetParams::defaults(LinkClass::sat_to_air);
  LinkBudgetParams ground_to_air = LinkBudgetParams::defaults(LinkClass::ground_to_air);
  LinkBudgetParams ground_to_sat = LinkBudgetParams::defaults(LinkClass::ground_to_sat);
  LinkBudgetParams isl_laser = LinkBudgetParams::defaults(LinkClass::isl_laser);

  const LinkBudgetParams& operator[](LinkClass cls) const;
  LinkBudgetParams& operator[](LinkClass cls);
  bool operator==(const LinkBudgetSet&) const = default;
};

/// Free-space path loss in dB: 92.45 + 20 log10(f_GHz) + 20 log10(d_km).
double fspl_db(double distance_km, double carrier_hz);

/// Linear SNR of an RF link using the full channel bandwidth.
double snr_linear(const LinkBudgetParams& params, double distance_km);

/// Shannon capacity when the link is granted `bandwidth_share` of its channel;
/// the noise bandwidth shrinks with the share, transmit power does not.
/// Laser ISLs return their fixed rate.
double capacity_bps(const LinkBudgetParams& params, double distance_km, double bandwidth_share = 1.0);

double propagation_delay_s(double distance_km);

/// Rate of an RF channel as a function of its bandwidth share,
/// rate(s) = s B log2(1 + S / s), with S the full-band SNR.
class ShannonChannel {
 public:
  ShannonChannel() = default;
  ShannonChannel(double bandwidth_hz, double full_band_snr);
  ShannonChannel(const LinkBudgetParams& params, double distance_km);

  double rate(double share) const;
  /// d rate / d share; +inf at share = 0.
  double rate_derivative(double share) const;
  /// Smallest share reaching `target_bps`, or 1 when even the full band falls short.
  double share_for_rate(double target_bps) const;

  double bandwidth_hz() const { return bandwidth_hz_; }
  double full_band_snr() const { return snr_; }

 private:
  double bandwidth_hz_ = 0.0;
  double snr_ = 0.0;
};

}  // namespace leoisl
