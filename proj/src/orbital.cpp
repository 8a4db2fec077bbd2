#include "leoisl/orbital.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Geometry>
#include <fmt/format.h>

namespace leoisl {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void require(bool ok, const char* field, const std::string& why) {
  if (!ok) throw std::invalid_argument(fmt::format("{}: {}", field, why));
}

}  // namespace

void ConstellationConfig::validate() const {
  require(num_planes >= 1, "num_planes", "must be >= 1");
  require(sats_per_plane >= 1, "sats_per_plane", "must be >= 1");
  require(altitude_km > 0.0, "altitude_km", "must be > 0");
  require(inclination_deg >= 0.0 && inclination_deg <= 180.0, "inclination_deg",
          "must lie in [0, 180]");
  require(phasing_factor >= 0 && phasing_factor <= std::max(0, num_planes - 1), "phasing_factor",
          "must lie in [0, num_planes - 1]");
  require(raan_spread_deg > 0.0 && raan_spread_deg <= 360.0, "raan_spread_deg",
          "must lie in (0, 360]");
}

double ConstellationConfig::mean_motion_rad_s() const {
  const double a = semi_major_axis_km();
  return std::sqrt(kEarthMuKm3S2 / (a * a * a));
}

double ConstellationConfig::period_s() const { return 2.0 * std::numbers::pi / mean_motion_rad_s(); }

std::vector<OrbitalElements> generate_walker(const ConstellationConfig& config) {
  config.validate();
  const int planes = config.num_planes;
  const int slots = config.sats_per_plane;
  std::vector<OrbitalElements> out;
  out.reserve(static_cast<std::size_t>(config.size()));
  for (int p = 0; p < planes; ++p) {
    const double raan = p * config.raan_spread_deg / planes;
    for (int s = 0; s < slots; ++s) {
      double anomaly = s * 360.0 / slots +
                       p * config.phasing_factor * 360.0 / (static_cast<double>(planes) * slots);
      anomaly = std::fmod(anomaly, 360.0);
      out.push_back({SatId{p, s}, raan, anomaly});
    }
  }
  return out;
}

std::vector<SatelliteState> propagate(const ConstellationConfig& config, double epoch_s) {
  if (epoch_s < 0.0) throw std::invalid_argument("epoch_s: must be >= 0");
  const auto elements = generate_walker(config);
  const double a = config.semi_major_axis_km();
  const double n = config.mean_motion_rad_s();
  const double speed = n * a;
  const double inc = config.inclination_deg * kDeg;

  std::vector<SatelliteState> states;
  states.reserve(elements.size());
  for (const auto& el : elements) {
    const Eigen::Matrix3d rot = (Eigen::AngleAxisd(el.raan_deg * kDeg, Vec3::UnitZ()) *
                                 Eigen::AngleAxisd(inc, Vec3::UnitX()))
                                    .toRotationMatrix();
    const double u = el.anomaly_deg * kDeg + n * epoch_s;
    const Vec3 in_plane_pos(std::cos(u), std::sin(u), 0.0);
    const Vec3 in_plane_vel(-std::sin(u), std::cos(u), 0.0);
    states.push_back({el.id, rot * (a * in_plane_pos), rot * (speed * in_plane_vel)});
  }
  return states;
}

std::string satellite_node_id(SatId id) { return fmt::format("sat-{}-{}", id.plane, id.slot); }

void GroundNode::validate() const {
  require(!node_id.empty(), "node_id", "must not be empty");
  for (char c : node_id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    require(ok, "node_id", fmt::format("'{}' may only contain [A-Za-z0-9_.-]", node_id));
  }
  require(std::abs(latitude_deg) <= 90.0, "latitude_deg", "must lie in [-90, 90]");
  require(std::abs(longitude_deg) <= 360.0, "longitude_deg", "must lie in [-360, 360]");
  require(altitude_km >= 0.0, "altitude_km", "must be >= 0");
  require(speed_km_s >= 0.0, "speed_km_s", "must be >= 0");
  if (kind == GroundKind::ground_station) {
    require(speed_km_s == 0.0, "speed_km_s", "ground stations do not move");
  }
}

GroundNode make_ground_station(std::string id, double lat_deg, double lon_deg) {
  return GroundNode{std::move(id), GroundKind::ground_station, lat_deg, lon_deg, 0.0, 0.0, 0.0};
}

GroundNode make_aircraft(std::string id, double lat_deg, double lon_deg, double heading_deg,
                         double speed_km_s, double altitude_km) {
  return GroundNode{std::move(id), GroundKind::aircraft, lat_deg, lon_deg,
                    altitude_km, heading_deg, speed_km_s};
}

std::pair<double, double> ground_track(const GroundNode& node, double epoch_s) {
  if (node.kind != GroundKind::aircraft || node.speed_km_s == 0.0) {
    return {node.latitude_deg, node.longitude_deg};
  }
  // Great-circle destination point for angular distance delta.
  const double delta = node.speed_km_s * epoch_s / (kEarthRadiusKm + node.altitude_km);
  const double lat1 = node.latitude_deg * kDeg;
  const double lon1 = node.longitude_deg * kDeg;
  const double brg = node.heading_deg * kDeg;
  const double sin_lat2 =
      std::sin(lat1) * std::cos(delta) + std::cos(lat1) * std::sin(delta) * std::cos(brg);
  const double lat2 = std::asin(std::clamp(sin_lat2, -1.0, 1.0));
  const double lon2 = lon1 + std::atan2(std::sin(brg) * std::sin(delta) * std::cos(lat1),
                                        std::cos(delta) - std::sin(lat1) * sin_lat2);
  return {lat2 / kDeg, lon2 / kDeg};
}

Vec3 ground_position(const GroundNode& node, double epoch_s) {
  const auto [lat_deg, lon_deg] = ground_track(node, epoch_s);
  const double r = kEarthRadiusKm + node.altitude_km;
  const double lat = lat_deg * kDeg;
  const double lon = lon_deg * kDeg + kEarthRotationRadS * epoch_s;
  return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon), r * std::sin(lat)};
}

bool visible(const Vec3& a, const Vec3& b, double grazing_altitude_km) {
  const Vec3 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return true;
  // Closest point of the segment to the Earth's centre.
  const double t = std::clamp(-a.dot(d) / len2, 0.0, 1.0);
  const Vec3 closest = a + t * d;
  const double limit = kEarthRadiusKm + grazing_altitude_km;
  return closest.squaredNorm() >= limit * limit;
}

double elevation_deg(const Vec3& observer, const Vec3& target) {
  const Vec3 los = target - observer;
  const double range = los.norm();
  if (range == 0.0) return 90.0;
  const double s = los.dot(observer.normalized()) / range;
  return std::asin(std::clamp(s, -1.0, 1.0)) / kDeg;
}

bool visible_from_ground(const Vec3& observer, const Vec3& target, double elevation_mask_deg) {
  return elevation_deg(observer, target) >= elevation_mask_deg;
}

}  // namespace leoisl
