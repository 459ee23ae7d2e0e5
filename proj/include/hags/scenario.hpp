#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hags/core.hpp"
#include "hags/geometry.hpp"
#include "hags/plan.hpp"
#include "hags/weather.hpp"

namespace hags {

enum class WeatherMode {
  oracle,    ///< routing sees the weather-carved plan
  reactive,  ///< routing sees the geometric plan; blocked links fail on use
};

struct TrafficSpec {
  int count = 50;
  Bits size_bits = 800'000'000'000;  // 100 GB
  TimeMs first_ms = 0;
  TimeMs spacing_ms = 0;             ///< 0: all files exist at first_ms
  std::string source = "LEO1";

  TimeMs generation_time(int k) const { return first_ms + spacing_ms * k; }
};

/// Complete description of one simulated configuration.
///
/// The evaluated schemes are "1LEO-nGS" (the LEO downlinks straight to n
/// ground stations) and "1LEO-nHAGS-nGS" (the LEO downlinks only to the
/// platforms, each of which relays to the station beneath it).
struct ScenarioConfig {
  std::uint64_t seed = 1;
  TimeMs duration_ms = 604'800'000;
  TrafficSpec traffic;
  RateBps rate_bps = 8'000'000'000;

  /// Site catalogue (ground stations only); gs_sites selects from it.
  std::vector<geometry::GroundSite> sites;
  std::string sites_file;
  std::vector<std::string> gs_sites;
  std::vector<std::string> hags_over;

  weather::WeatherModel weather{};
  WeatherMode mode = WeatherMode::oracle;
  weather::StartRule weather_start = weather::StartRule::stationary;

  geometry::VisibilityRule visibility{};
  geometry::WalkerStar constellation{};
  int traffic_sat = 0;
  double step_s = 10.0;
  geometry::EarthModel earth{};

  Bits buffer_capacity_bits = 0;  ///< per relay/source node; 0 means unlimited

  void validate() const;

  const geometry::GroundSite& site(std::string_view id) const;
  bool has_hags_over(std::string_view gs_id) const;
  std::vector<plan::Node> nodes() const;
  std::vector<std::string> destinations() const { return gs_sites; }
  std::vector<std::string> weather_sites() const { return gs_sites; }
  geometry::Satellite traffic_satellite() const;
  std::string scheme_name() const;

  /// Canonical key/value listing, the same keys the file reader accepts.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Flat `key = value` text, `#` comments. Relative `sites_file` paths are
/// resolved against `base_dir`. `site = <id> <lat> <lon> <alt>` lines add
/// catalogue entries inline.
ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

std::string_view to_string(WeatherMode mode);

/// Contacts of every catalogue station and of a platform over each, for
/// the traffic satellite. Scenario plans are subsets of this.
plan::ContactPlan universe_plan(const ScenarioConfig& scenario);

/// The subset of `universe` this scenario's scheme can use, renumbered.
plan::ContactPlan restrict_plan(const plan::ContactPlan& universe, const ScenarioConfig& scenario);

/// Geometric contact plan of the scenario's scheme.
plan::ContactPlan geometric_plan(const ScenarioConfig& scenario);

/// Weather for the scenario's stations under replication `rep`.
weather::WeatherPlan weather_plan(const ScenarioConfig& scenario, std::uint64_t rep);

}  // namespace hags
