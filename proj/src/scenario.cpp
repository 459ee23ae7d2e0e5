#include "hags/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "text_util.hpp"

namespace hags {

std::string_view to_string(WeatherMode mode) {
  return mode == WeatherMode::oracle ? "oracle" : "reactive";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(fmt::format("write failed for '{}'", path.string()));
}

void ScenarioConfig::validate() const {
  if (duration_ms <= 0) throw ConfigError("duration_s must be positive");
  if (traffic.count < 0) throw ConfigError("traffic.count must be >= 0");
  if (traffic.size_bits <= 0) throw ConfigError("traffic.size_bytes must be positive");
  if (traffic.first_ms < 0 || traffic.spacing_ms < 0)
    throw ConfigError("traffic schedule must be non-negative");
  if (traffic.count > 0 && traffic.generation_time(traffic.count - 1) >= duration_ms)
    throw ConfigError("traffic generation extends past the run");
  if (rate_bps <= 0) throw ConfigError("rate_bps must be positive");
  if (gs_sites.empty()) throw ConfigError("gs_sites is empty");
  std::set<std::string> seen;
  for (const auto& id : gs_sites) {
    site(id);
    if (!seen.insert(id).second) throw ConfigError(fmt::format("gs_sites lists '{}' twice", id));
  }
  std::set<std::string> hags_seen;
  for (const auto& id : hags_over) {
    if (!seen.count(id)) throw ConfigError(fmt::format("hags_over '{}' is not in gs_sites", id));
    if (!hags_seen.insert(id).second)
      throw ConfigError(fmt::format("hags_over lists '{}' twice", id));
  }
  weather.validate();
  visibility.validate();
  earth.validate();
  if (constellation.planes <= 0 || constellation.sats_per_plane <= 0)
    throw ConfigError("constellation counts must be positive");
  if (traffic_sat < 0 || traffic_sat >= constellation.planes * constellation.sats_per_plane)
    throw ConfigError("constellation.traffic_sat out of range");
  if (!(step_s > 0.0)) throw ConfigError("contacts.step_s must be positive");
  if (buffer_capacity_bits < 0) throw ConfigError("buffer_capacity_bytes must be >= 0");
  if (traffic.source.empty()) throw ConfigError("traffic.source is empty");
}

const geometry::GroundSite& ScenarioConfig::site(std::string_view id) const {
  for (const auto& s : sites)
    if (s.site_id == id) return s;
  throw ConfigError(fmt::format("unknown site '{}'", id));
}

bool ScenarioConfig::has_hags_over(std::string_view gs_id) const {
  return std::find(hags_over.begin(), hags_over.end(), gs_id) != hags_over.end();
}

std::vector<plan::Node> ScenarioConfig::nodes() const {
  std::vector<plan::Node> out{{traffic.source, plan::NodeKind::leo}};
  for (const auto& gs : hags_over) out.push_back({geometry::hags_node_id(gs), plan::NodeKind::hags});
  for (const auto& gs : gs_sites) out.push_back({gs, plan::NodeKind::gs});
  return out;
}

geometry::Satellite ScenarioConfig::traffic_satellite() const {
  auto orbits = constellation.orbits();
  return {traffic.source, orbits.at(static_cast<std::size_t>(traffic_sat))};
}

std::string ScenarioConfig::scheme_name() const {
  if (hags_over.empty()) return fmt::format("1LEO-{}GS", gs_sites.size());
  return fmt::format("1LEO-{}HAGS-{}GS", hags_over.size(), gs_sites.size());
}

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

std::vector<std::pair<std::string, std::string>> ScenarioConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> kv{
      {"seed", std::to_string(seed)},
      {"duration_s", format_seconds(duration_ms)},
      {"traffic.count", std::to_string(traffic.count)},
      {"traffic.size_bytes", std::to_string(traffic.size_bits / 8)},
      {"traffic.first_s", format_seconds(traffic.first_ms)},
      {"traffic.spacing_s", format_seconds(traffic.spacing_ms)},
      {"traffic.source", traffic.source},
      {"rate_bps", std::to_string(rate_bps)},
      {"gs_sites", join(gs_sites)},
      {"hags_over", join(hags_over)},
      {"weather.tcc_hours", num(weather.tcc_hours)},
      {"weather.tcs_hours", num(weather.tcs_hours)},
      {"weather.mode", std::string(to_string(mode))},
      {"weather.start",
       weather_start == weather::StartRule::stationary ? "stationary" : "clear"},
      {"visibility.min_elevation_deg", num(visibility.min_elevation_deg)},
      {"visibility.min_grazing_altitude_km", num(visibility.min_grazing_altitude_km)},
      {"constellation.planes", std::to_string(constellation.planes)},
      {"constellation.sats_per_plane", std::to_string(constellation.sats_per_plane)},
      {"constellation.phasing", std::to_string(constellation.phasing)},
      {"constellation.inclination_deg", num(constellation.inclination_deg)},
      {"constellation.altitude_km", num(constellation.altitude_km)},
      {"constellation.traffic_sat", std::to_string(traffic_sat)},
      {"contacts.step_s", num(step_s)},
      {"buffer_capacity_bytes", std::to_string(buffer_capacity_bits / 8)},
  };
  for (const auto& s : sites)
    kv.emplace_back("site", fmt::format("{} {} {} {}", s.site_id, s.lat_deg, s.lon_deg,
                                        s.altitude_km));
  return kv;
}

ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  ScenarioConfig cfg;
  std::vector<geometry::GroundSite> inline_sites;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto body = detail::strip_comment(lines[i]);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(i + 1, fmt::format("expected 'key = value', got '{}'", body));
    const std::string key(detail::trim(body.substr(0, eq)));
    const std::string_view value = detail::trim(body.substr(eq + 1));
    auto f64 = [&] { return detail::parse_number<double>(value, key); };
    auto i64 = [&] { return detail::parse_number<std::int64_t>(value, key); };
    auto u64 = [&] { return detail::parse_number<std::uint64_t>(value, key); };
    try {
      if (key == "seed") cfg.seed = u64();
      else if (key == "duration_s") cfg.duration_ms = parse_seconds(value);
      else if (key == "traffic.count") cfg.traffic.count = static_cast<int>(i64());
      else if (key == "traffic.size_bytes") cfg.traffic.size_bits = i64() * 8;
      else if (key == "traffic.first_s") cfg.traffic.first_ms = parse_seconds(value);
      else if (key == "traffic.spacing_s") cfg.traffic.spacing_ms = parse_seconds(value);
      else if (key == "traffic.source") cfg.traffic.source = std::string(value);
      else if (key == "rate_bps") cfg.rate_bps = i64();
      else if (key == "sites_file") cfg.sites_file = std::string(value);
      else if (key == "site") {
        auto sites = geometry::parse_site_list("site " + std::string(value));
        inline_sites.push_back(sites.at(0));
      }
      else if (key == "gs_sites") cfg.gs_sites = detail::split_list(value);
      else if (key == "hags_over") cfg.hags_over = detail::split_list(value);
      else if (key == "weather.tcc_hours") cfg.weather.tcc_hours = f64();
      else if (key == "weather.tcs_hours") cfg.weather.tcs_hours = f64();
      else if (key == "weather.mode") {
        if (value == "oracle") cfg.mode = WeatherMode::oracle;
        else if (value == "reactive") cfg.mode = WeatherMode::reactive;
        else throw ConfigError(fmt::format("weather.mode must be oracle or reactive, got '{}'", value));
      }
      else if (key == "weather.start") {
        if (value == "stationary") cfg.weather_start = weather::StartRule::stationary;
        else if (value == "clear") cfg.weather_start = weather::StartRule::clear;
        else throw ConfigError(fmt::format("weather.start must be stationary or clear, got '{}'", value));
      }
      else if (key == "visibility.min_elevation_deg") cfg.visibility.min_elevation_deg = f64();
      else if (key == "visibility.min_grazing_altitude_km") cfg.visibility.min_grazing_altitude_km = f64();
      else if (key == "constellation.planes") cfg.constellation.planes = static_cast<int>(i64());
      else if (key == "constellation.sats_per_plane") cfg.constellation.sats_per_plane = static_cast<int>(i64());
      else if (key == "constellation.phasing") cfg.constellation.phasing = static_cast<int>(i64());
      else if (key == "constellation.inclination_deg") cfg.constellation.inclination_deg = f64();
      else if (key == "constellation.altitude_km") cfg.constellation.altitude_km = f64();
      else if (key == "constellation.traffic_sat") cfg.traffic_sat = static_cast<int>(i64());
      else if (key == "contacts.step_s") cfg.step_s = f64();
      else if (key == "buffer_capacity_bytes") cfg.buffer_capacity_bits = i64() * 8;
      else throw ConfigError(fmt::format("unknown key '{}'", key));
    } catch (const ParseError& e) {
      throw ParseError(i + 1, e.what());
    } catch (const ConfigError& e) {
      throw ParseError(i + 1, e.what());
    }
  }
  if (!cfg.sites_file.empty()) {
    std::filesystem::path p(cfg.sites_file);
    if (p.is_relative()) p = base_dir / p;
    cfg.sites = geometry::parse_site_list(read_text_file(p));
  }
  for (auto& s : inline_sites) {
    for (const auto& other : cfg.sites)
      if (other.site_id == s.site_id)
        throw ConfigError(fmt::format("duplicate site id '{}'", s.site_id));
    cfg.sites.push_back(std::move(s));
  }
  for (const auto& s : cfg.sites)
    if (s.kind != geometry::SiteKind::ground)
      throw ConfigError(fmt::format("site '{}': catalogue sites must be ground stations", s.site_id));
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_text_file(path), path.parent_path());
}

namespace {

plan::ContactPlan contacts_for(const ScenarioConfig& s, const std::vector<std::string>& gs_ids) {
  std::vector<geometry::GroundSite> sites;
  for (const auto& id : gs_ids) {
    const auto& gs = s.site(id);
    sites.push_back(gs);
    sites.push_back(geometry::hags_over(gs));
  }
  const auto sat = s.traffic_satellite();
  geometry::ContactOptions opt;
  opt.horizon_s = ms_to_seconds(s.duration_ms);
  opt.step_s = s.step_s;
  opt.rate_bps = s.rate_bps;
  opt.earth = s.earth;
  return geometry::generate_contacts(std::span<const geometry::Satellite>(&sat, 1), sites,
                                     s.visibility, opt);
}

}  // namespace

plan::ContactPlan universe_plan(const ScenarioConfig& scenario) {
  std::vector<std::string> ids;
  for (const auto& s : scenario.sites) ids.push_back(s.site_id);
  return contacts_for(scenario, ids);
}

plan::ContactPlan restrict_plan(const plan::ContactPlan& universe, const ScenarioConfig& s) {
  std::set<std::string> gs(s.gs_sites.begin(), s.gs_sites.end());
  std::set<std::string> hags;
  for (const auto& id : s.hags_over) hags.insert(geometry::hags_node_id(id));
  const std::string& leo = s.traffic.source;

  auto allowed = [&](const std::string& a, const std::string& b) {
    if (a == leo && gs.count(b)) return !s.has_hags_over(b);
    if (a == leo && hags.count(b)) return true;
    if (hags.count(a) && gs.count(b)) return geometry::hags_node_id(b) == a;
    return false;
  };
  plan::ContactPlan out;
  out.horizon_ms = universe.horizon_ms;
  for (const auto& c : universe.contacts)
    if (allowed(c.tx, c.rx) || allowed(c.rx, c.tx)) out.contacts.push_back(c);
  plan::canonicalize(out);
  return out;
}

plan::ContactPlan geometric_plan(const ScenarioConfig& scenario) {
  return restrict_plan(contacts_for(scenario, scenario.gs_sites), scenario);
}

weather::WeatherPlan weather_plan(const ScenarioConfig& scenario, std::uint64_t rep) {
  return weather::sample_weather_plan(scenario.weather, scenario.weather_sites(),
                                      scenario.duration_ms, scenario.seed, rep,
                                      scenario.weather_start);
}

}  // namespace hags
