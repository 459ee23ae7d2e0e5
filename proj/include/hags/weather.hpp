#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hags/core.hpp"
#include "hags/rng.hpp"

namespace hags::weather {

/// Exponential on/off cloud-cover model.
///
/// Clear spells last Exponential(mean = TCC) and cloud-covered spells last
/// Exponential(mean = TCS). The cloud-cover rate is mu = 1 / TCC.
struct WeatherModel {
  double tcc_hours = 5.0;  ///< mean time to cloud cover (mean clear spell)
  double tcs_hours = 5.0;  ///< mean time to clear sky (mean blocked spell)

  void validate() const;
  double cloud_cover_rate_per_hour() const { return 1.0 / tcc_hours; }
  /// Long-run fraction of time spent blocked, TCS / (TCC + TCS).
  double blocked_fraction() const { return tcs_hours / (tcc_hours + tcs_hours); }
};

/// Probability that a clear sky has clouded over within `t_hours`:
/// C(t) = 1 - exp(-t / TCC).
double cloud_cover_cdf(const WeatherModel& model, double t_hours);

enum class StartRule {
  stationary,  ///< initial state drawn from the stationary distribution
  clear,       ///< every site starts clear at t = 0
};

/// Alternating clear/blocked renewal process over one substream.
class OnOffProcess {
 public:
  struct Spell {
    bool blocked;
    double duration_s;
  };

  OnOffProcess(const WeatherModel& model, rng::Stream& stream,
               StartRule start = StartRule::stationary);

  /// Next spell. Spells alternate strictly between clear and blocked.
  Spell next();

 private:
  WeatherModel model_;
  rng::Stream* stream_;
  bool next_blocked_;
};

struct BlockedInterval {
  std::string site_id;
  TimeMs start_ms = 0;
  TimeMs end_ms = 0;

  friend bool operator==(const BlockedInterval&, const BlockedInterval&) = default;
};

/// Sorted, disjoint, horizon-clipped blocked intervals for every declared
/// site. A site with no clouds is still a key (with an empty list), which
/// is what lets contact carving tell "always clear" from "unknown site".
struct WeatherPlan {
  TimeMs horizon_ms = 0;
  std::map<std::string, std::vector<BlockedInterval>> intervals;

  bool has_site(std::string_view site) const;
  const std::vector<BlockedInterval>& site(std::string_view site) const;
  bool is_blocked(std::string_view site, TimeMs t) const;
  /// Blocked measure of `site` within [from, to).
  TimeMs blocked_ms(std::string_view site, TimeMs from, TimeMs to) const;
  void validate() const;

  friend bool operator==(const WeatherPlan&, const WeatherPlan&) = default;
};

std::vector<BlockedInterval> sample_weather_plan(const WeatherModel& model,
                                                 std::string_view site_id, TimeMs horizon_ms,
                                                 rng::Stream& stream,
                                                 StartRule start = StartRule::stationary);

/// Builds a plan for `sites`, each from its own (master_seed, site, rep)
/// substream.
WeatherPlan sample_weather_plan(const WeatherModel& model, const std::vector<std::string>& sites,
                                TimeMs horizon_ms, std::uint64_t master_seed,
                                std::uint64_t replication,
                                StartRule start = StartRule::stationary);

/// Text form:
///   site <site_id>                     (declares a site, possibly cloud-free)
///   blocked <site_id> <start_s> <end_s>
/// `#` starts a comment. Output is sorted by (site_id, start).
std::string serialize_weather_plan(const WeatherPlan& plan);
WeatherPlan parse_weather_plan(std::string_view text, TimeMs horizon_ms);

}  // namespace hags::weather
