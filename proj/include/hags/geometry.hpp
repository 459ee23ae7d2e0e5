#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hags/core.hpp"
#include "hags/plan.hpp"

namespace hags::geometry {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double k) const { return {x * k, y * k, z * k}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const;
};

struct EarthModel {
  double radius_km = 6371.0;
  double mu_km3s2 = 398600.4418;
  double rotation_rate_rad_s = 7.2921159e-5;

  void validate() const;
};

struct CircularOrbit {
  double altitude_km = 780.0;
  double inclination_deg = 86.4;
  double raan_deg = 0.0;
  double initial_anomaly_deg = 0.0;  ///< argument of latitude at epoch
  double epoch_s = 0.0;

  /// Checks altitude and wraps the angles into [0, 360).
  CircularOrbit normalized() const;
  double semi_major_axis_km(const EarthModel& earth) const {
    return earth.radius_km + altitude_km;
  }
  double period_s(const EarthModel& earth) const;
};

/// A named satellite node and its orbit.
struct Satellite {
  std::string node_id;
  CircularOrbit orbit;
};

/// Walker-star constellation: `planes` planes spread over 180 deg of RAAN,
/// `sats_per_plane` evenly spaced satellites per plane, inter-plane phase
/// offset `phasing * 360 / total` deg.
struct WalkerStar {
  int planes = 6;
  int sats_per_plane = 11;
  int phasing = 2;
  double inclination_deg = 86.4;
  double altitude_km = 780.0;

  std::vector<CircularOrbit> orbits() const;
};

enum class SiteKind {
  ground,         ///< terrestrial station; elevation-mask visibility
  high_altitude,  ///< stratospheric platform; line-of-sight visibility
};

struct GroundSite {
  std::string site_id;
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double altitude_km = 0.0;
  SiteKind kind = SiteKind::ground;

  Vec3 position(const EarthModel& earth) const;
};

/// Altitude of a high-altitude ground station above its terrestrial site.
inline constexpr double kHagsAltitudeKm = 20.0;

/// Node id of the platform over ground station `gs_id`: "GS3" -> "HAGS3",
/// any other id -> "HAGS_<id>".
std::string hags_node_id(std::string_view gs_id);

/// The platform 20 km above `gs` (same lat/lon, high_altitude kind).
GroundSite hags_over(const GroundSite& gs);

struct VisibilityRule {
  double min_elevation_deg = 10.0;       ///< LEO–GS mask
  double min_grazing_altitude_km = 18.0;  ///< LEO–HAGS ray must stay above this

  void validate() const;
};

/// Earth-fixed position at `t_s` seconds after t = 0. The Earth-fixed frame
/// coincides with the inertial frame at t = 0.
Vec3 propagate(const CircularOrbit& orbit, const EarthModel& earth, double t_s);

/// Elevation of `sat` above the local horizontal plane at `site`, degrees.
double elevation_deg(const GroundSite& site, const Vec3& sat, const EarthModel& earth);

/// Lowest altitude above the sphere reached by the segment p1–p2. Negative
/// when the segment passes through the Earth.
double los_grazing_altitude_km(const Vec3& p1, const Vec3& p2, const EarthModel& earth);

struct ContactOptions {
  double horizon_s = 604800.0;
  double step_s = 10.0;
  RateBps rate_bps = 8'000'000'000;
  EarthModel earth{};
};

/// Geometric contact plan. Each maximal visibility window between a
/// satellite and a site becomes two directed contacts; boundaries are
/// bisected to within 1 s. Each high-altitude site with a colocated ground
/// site also gets a permanent platform<->ground pair over the whole horizon.
/// LEO–GS and HAGS–GS contacts carry the ground site as weather_site.
plan::ContactPlan generate_contacts(std::span<const Satellite> satellites,
                                    std::span<const GroundSite> sites, const VisibilityRule& rule,
                                    const ContactOptions& options);

/// Site list text: `site <site_id> <lat_deg> <lon_deg> <alt_km>`, `#` comments.
/// Sites at altitude >= 20 km are read as high-altitude platforms.
std::vector<GroundSite> parse_site_list(std::string_view text);

}  // namespace hags::geometry
