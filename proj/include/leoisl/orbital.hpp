#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace leoisl {

using Vec3 = Eigen::Vector3d;

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kEarthMuKm3S2 = 398600.4418;
inline constexpr double kEarthRotationRadS = 7.2921159e-5;
inline constexpr double kSpeedOfLightKmS = 299792.458;

/// Walker-delta constellation geometry. Invariants are checked by validate(),
/// which every consumer calls before use.
struct ConstellationConfig {
  int num_planes = 6;
  int sats_per_plane = 20;
  double altitude_km = 1000.0;
  double inclination_deg = 53.0;
  int phasing_factor = 1;
  double raan_spread_deg = 360.0;

  void validate() const;
  int size() const { return num_planes * sats_per_plane; }
  double semi_major_axis_km() const { return kEarthRadiusKm + altitude_km; }
  double mean_motion_rad_s() const;
  double period_s() const;

  bool operator==(const ConstellationConfig&) const = default;
};

struct SatId {
  int plane = 0;
  int slot = 0;

  bool operator==(const SatId&) const = default;
  auto operator<=>(const SatId&) const = default;
};

/// Initial orbital elements of one satellite (circular orbit, so RAAN and the
/// argument of latitude at t = 0 are enough).
struct OrbitalElements {
  SatId id;
  double raan_deg = 0.0;
  double anomaly_deg = 0.0;
};

struct SatelliteState {
  SatId id;
  Vec3 position_km = Vec3::Zero();
  Vec3 velocity_km_s = Vec3::Zero();
};

/// Satellites are indexed plane-major: index = plane * sats_per_plane + slot.
std::vector<OrbitalElements> generate_walker(const ConstellationConfig& config);

std::vector<SatelliteState> propagate(const ConstellationConfig& config, double epoch_s);

std::string satellite_node_id(SatId id);

enum class GroundKind { ground_station, aircraft };

struct GroundNode {
  std::string node_id;
  GroundKind kind = GroundKind::ground_station;
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  double altitude_km = 0.0;
  // Aircraft only: initial great-circle heading (clockwise from north) and
  // ground speed.
  double heading_deg = 0.0;
  double speed_km_s = 0.0;

  void validate() const;
  bool operator==(const GroundNode&) const = default;
};

GroundNode make_ground_station(std::string id, double lat_deg, double lon_deg);
GroundNode make_aircraft(std::string id, double lat_deg, double lon_deg, double heading_deg,
                         double speed_km_s = 0.23, double altitude_km = 10.7);

/// Inertial position at epoch_s. The Greenwich meridian is aligned with +x at
/// t = 0; ground nodes rotate with the Earth.
Vec3 ground_position(const GroundNode& node, double epoch_s);

/// Earth-fixed latitude/longitude (degrees) of an aircraft after flying
/// along its great circle for epoch_s seconds.
std::pair<double, double> ground_track(const GroundNode& node, double epoch_s);

/// Space-to-space line of sight: the segment a-b must clear the sphere of
/// radius R_earth + grazing_altitude_km. A zero-length segment is visible.
bool visible(const Vec3& a, const Vec3& b, double grazing_altitude_km = 80.0);

/// Elevation of target above the local horizon of an observer on/near the
/// Earth's surface, in degrees.
double elevation_deg(const Vec3& observer, const Vec3& target);

bool visible_from_ground(const Vec3& observer, const Vec3& target, double elevation_mask_deg = 10.0);

}  // namespace leoisl
