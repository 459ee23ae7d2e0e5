#include "hags/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "text_util.hpp"

namespace hags::geometry {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double wrap_degrees(double a) {
  a = std::fmod(a, 360.0);
  return a < 0.0 ? a + 360.0 : a;
}

}  // namespace

double Vec3::norm() const { return std::sqrt(dot(*this)); }

void EarthModel::validate() const {
  if (!(radius_km > 0.0) || !(mu_km3s2 > 0.0) || !(rotation_rate_rad_s > 0.0))
    throw ConfigError("earth model parameters must be positive");
}

CircularOrbit CircularOrbit::normalized() const {
  if (!(altitude_km > 0.0)) throw ConfigError("orbit altitude must be positive");
  CircularOrbit o = *this;
  o.inclination_deg = wrap_degrees(inclination_deg);
  o.raan_deg = wrap_degrees(raan_deg);
  o.initial_anomaly_deg = wrap_degrees(initial_anomaly_deg);
  return o;
}

double CircularOrbit::period_s(const EarthModel& earth) const {
  const double a = semi_major_axis_km(earth);
  return 2.0 * std::numbers::pi * std::sqrt(a * a * a / earth.mu_km3s2);
}

std::vector<CircularOrbit> WalkerStar::orbits() const {
  if (planes <= 0 || sats_per_plane <= 0) throw ConfigError("walker: counts must be positive");
  const int total = planes * sats_per_plane;
  std::vector<CircularOrbit> out;
  out.reserve(static_cast<std::size_t>(total));
  for (int p = 0; p < planes; ++p) {
    for (int s = 0; s < sats_per_plane; ++s) {
      CircularOrbit o;
      o.altitude_km = altitude_km;
      o.inclination_deg = inclination_deg;
      o.raan_deg = 180.0 * p / planes;
      o.initial_anomaly_deg = 360.0 * s / sats_per_plane + 360.0 * phasing * p / total;
      out.push_back(o.normalized());
    }
  }
  return out;
}

Vec3 GroundSite::position(const EarthModel& earth) const {
  const double r = earth.radius_km + altitude_km;
  const double lat = lat_deg * kDeg;
  const double lon = lon_deg * kDeg;
  return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon), r * std::sin(lat)};
}

std::string hags_node_id(std::string_view gs_id) {
  if (gs_id.size() > 2 && gs_id.substr(0, 2) == "GS") return "HAGS" + std::string(gs_id.substr(2));
  return "HAGS_" + std::string(gs_id);
}

GroundSite hags_over(const GroundSite& gs) {
  return {hags_node_id(gs.site_id), gs.lat_deg, gs.lon_deg, kHagsAltitudeKm,
          SiteKind::high_altitude};
}

void VisibilityRule::validate() const {
  if (!(min_elevation_deg >= 0.0 && min_elevation_deg <= 90.0))
    throw ConfigError("min_elevation_deg must lie in [0, 90]");
  if (!(min_grazing_altitude_km >= 0.0)) throw ConfigError("min_grazing_altitude_km must be >= 0");
}

Vec3 propagate(const CircularOrbit& orbit, const EarthModel& earth, double t_s) {
  const double a = orbit.semi_major_axis_km(earth);
  const double n = std::sqrt(earth.mu_km3s2 / (a * a * a));
  const double u = orbit.initial_anomaly_deg * kDeg + n * (t_s - orbit.epoch_s);
  const double raan = orbit.raan_deg * kDeg;
  const double inc = orbit.inclination_deg * kDeg;
  const double cu = std::cos(u), su = std::sin(u);
  const double cO = std::cos(raan), sO = std::sin(raan);
  const double ci = std::cos(inc), si = std::sin(inc);
  const Vec3 inertial{a * (cu * cO - su * ci * sO), a * (cu * sO + su * ci * cO), a * su * si};
  const double theta = earth.rotation_rate_rad_s * t_s;
  const double ct = std::cos(theta), st = std::sin(theta);
  return {ct * inertial.x + st * inertial.y, -st * inertial.x + ct * inertial.y, inertial.z};
}

double elevation_deg(const GroundSite& site, const Vec3& sat, const EarthModel& earth) {
  const Vec3 p = site.position(earth);
  const Vec3 up = p * (1.0 / p.norm());
  const Vec3 rel = sat - p;
  const double s = std::clamp(rel.dot(up) / rel.norm(), -1.0, 1.0);
  return std::asin(s) / kDeg;
}

double los_grazing_altitude_km(const Vec3& p1, const Vec3& p2, const EarthModel& earth) {
  const Vec3 d = p2 - p1;
  const double len2 = d.dot(d);
  const double endpoint_min = std::min(p1.norm(), p2.norm()) - earth.radius_km;
  if (len2 == 0.0) return endpoint_min;
  const double s = -p1.dot(d) / len2;
  if (s <= 0.0 || s >= 1.0) return endpoint_min;
  return (p1 + d * s).norm() - earth.radius_km;
}

namespace {

const GroundSite* colocated_ground(const GroundSite& platform, std::span<const GroundSite> sites) {
  for (const auto& s : sites)
    if (s.kind == SiteKind::ground && std::abs(s.lat_deg - platform.lat_deg) < 1e-9 &&
        std::abs(s.lon_deg - platform.lon_deg) < 1e-9)
      return &s;
  return nullptr;
}

class PassFinder {
 public:
  PassFinder(const Satellite& sat, const GroundSite& site, const VisibilityRule& rule,
             const EarthModel& earth)
      : sat_(sat), site_(site), rule_(rule), earth_(earth), site_pos_(site.position(earth)) {}

  bool visible(double t) const {
    const Vec3 p = propagate(sat_.orbit, earth_, t);
    if (site_.kind == SiteKind::ground)
      return elevation_deg(site_, p, earth_) >= rule_.min_elevation_deg;
    return los_grazing_altitude_km(site_pos_, p, earth_) >= rule_.min_grazing_altitude_km;
  }

  /// Shrinks [lo, hi] (visible(lo) != visible(hi)) to at most half a second.
  std::pair<double, double> bisect(double lo, double hi) const {
    const bool lo_state = visible(lo);
    while (hi - lo > 0.5) {
      const double mid = 0.5 * (lo + hi);
      (visible(mid) == lo_state ? lo : hi) = mid;
    }
    return {lo, hi};
  }

  /// Maximal visibility windows in seconds, boundaries on the visible side.
  std::vector<std::pair<double, double>> windows(double horizon, double step) const {
    std::vector<std::pair<double, double>> out;
    double t_prev = 0.0;
    bool prev = visible(0.0);
    double rise = 0.0;
    for (long k = 1;; ++k) {
      const double t = std::min(static_cast<double>(k) * step, horizon);
      const bool now = visible(t);
      if (now != prev) {
        auto [lo, hi] = bisect(t_prev, t);
        if (now)
          rise = hi;
        else
          out.emplace_back(rise, lo);
      }
      prev = now;
      t_prev = t;
      if (t >= horizon) break;
    }
    if (prev) out.emplace_back(rise, horizon);
    return out;
  }

 private:
  const Satellite& sat_;
  const GroundSite& site_;
  const VisibilityRule& rule_;
  const EarthModel& earth_;
  Vec3 site_pos_;
};

}  // namespace

plan::ContactPlan generate_contacts(std::span<const Satellite> satellites,
                                    std::span<const GroundSite> sites, const VisibilityRule& rule,
                                    const ContactOptions& options) {
  if (!(options.horizon_s > 0.0) || !(options.step_s > 0.0))
    throw ConfigError("contact generation: horizon and step must be positive");
  if (options.rate_bps <= 0) throw ConfigError("contact generation: rate must be positive");
  rule.validate();
  options.earth.validate();

  plan::ContactPlan out;
  out.horizon_ms = seconds_to_ms(options.horizon_s);

  auto emit_pair = [&](const std::string& a, const std::string& b, TimeMs start, TimeMs end,
                       const std::optional<std::string>& weather_site) {
    if (end <= start) return;
    out.contacts.push_back({"", a, b, start, end, options.rate_bps, weather_site});
    out.contacts.push_back({"", b, a, start, end, options.rate_bps, weather_site});
  };

  for (const auto& sat : satellites) {
    for (const auto& site : sites) {
      PassFinder finder(sat, site, rule, options.earth);
      std::optional<std::string> weather_site;
      if (site.kind == SiteKind::ground) weather_site = site.site_id;
      for (auto [rise, set] : finder.windows(options.horizon_s, options.step_s)) {
        const TimeMs start = static_cast<TimeMs>(std::ceil(rise * 1000.0));
        const TimeMs end = std::min(static_cast<TimeMs>(std::floor(set * 1000.0)), out.horizon_ms);
        emit_pair(sat.node_id, site.site_id, start, end, weather_site);
      }
    }
  }
  for (const auto& site : sites) {
    if (site.kind != SiteKind::high_altitude) continue;
    if (const GroundSite* gs = colocated_ground(site, sites))
      emit_pair(site.site_id, gs->site_id, 0, out.horizon_ms, gs->site_id);
  }
  plan::canonicalize(out);
  return out;
}

std::vector<GroundSite> parse_site_list(std::string_view text) {
  std::vector<GroundSite> sites;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto body = detail::strip_comment(lines[i]);
    if (body.empty()) continue;
    const auto tok = detail::split_ws(body);
    if (tok.size() != 5 || tok[0] != "site")
      throw ParseError(i + 1, fmt::format("malformed site line '{}'", body));
    GroundSite s;
    try {
      s.site_id = std::string(tok[1]);
      s.lat_deg = detail::parse_number<double>(tok[2], "latitude");
      s.lon_deg = detail::parse_number<double>(tok[3], "longitude");
      s.altitude_km = detail::parse_number<double>(tok[4], "altitude");
    } catch (const ConfigError& e) {
      throw ParseError(i + 1, e.what());
    }
    if (s.lat_deg < -90.0 || s.lat_deg > 90.0) throw ParseError(i + 1, "latitude out of range");
    if (s.lon_deg < -180.0 || s.lon_deg > 180.0) throw ParseError(i + 1, "longitude out of range");
    if (s.altitude_km < 0.0) throw ParseError(i + 1, "negative altitude");
    s.kind = s.altitude_km >= kHagsAltitudeKm ? SiteKind::high_altitude : SiteKind::ground;
    for (const auto& other : sites)
      if (other.site_id == s.site_id)
        throw ParseError(i + 1, fmt::format("duplicate site id '{}'", s.site_id));
    sites.push_back(std::move(s));
  }
  return sites;
}

}  // namespace hags::geometry
