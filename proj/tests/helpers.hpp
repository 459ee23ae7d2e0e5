#pragma once

#include <string>
#include <string_view>

#include "hags/plan.hpp"
#include "hags/scenario.hpp"
#include "hags/weather.hpp"

namespace testing {

inline constexpr hags::Bits kFile = 800'000'000'000;  // 100 GB
inline constexpr hags::RateBps kRate = 8'000'000'000;
inline constexpr hags::TimeMs kWeek = 604'800'000;

/// One LEO, ground stations GS1..GSn, optional platforms; one 100 GB file at t=0.
inline hags::ScenarioConfig tiny_scenario(int n_gs = 1, int n_hags = 0, int files = 1) {
  hags::ScenarioConfig s;
  for (int i = 1; i <= n_gs; ++i) {
    hags::geometry::GroundSite g;
    g.site_id = "GS" + std::to_string(i);
    g.lat_deg = 10.0 * i;
    s.sites.push_back(g);
    s.gs_sites.push_back(g.site_id);
    if (i <= n_hags) s.hags_over.push_back(g.site_id);
  }
  s.traffic.count = files;
  s.traffic.size_bits = kFile;
  return s;
}

inline hags::plan::ContactPlan plan_of(std::string_view text, hags::TimeMs horizon = kWeek) {
  return hags::plan::parse_contact_plan(text, horizon);
}

inline hags::weather::WeatherPlan weather_of(std::string_view text, hags::TimeMs horizon = kWeek) {
  return hags::weather::parse_weather_plan(text, horizon);
}

}  // namespace testing
