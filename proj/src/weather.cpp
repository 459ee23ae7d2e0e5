#include "hags/weather.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "text_util.hpp"

namespace hags::weather {

void WeatherModel::validate() const {
  if (!(tcc_hours > 0.0) || !std::isfinite(tcc_hours))
    throw ConfigError("weather: tcc_hours must be positive");
  if (!(tcs_hours > 0.0) || !std::isfinite(tcs_hours))
    throw ConfigError("weather: tcs_hours must be positive");
}

double cloud_cover_cdf(const WeatherModel& model, double t_hours) {
  if (t_hours < 0.0) throw ConfigError("cloud_cover_cdf: negative time");
  return -std::expm1(-model.cloud_cover_rate_per_hour() * t_hours);
}

OnOffProcess::OnOffProcess(const WeatherModel& model, rng::Stream& stream, StartRule start)
    : model_(model), stream_(&stream) {
  model_.validate();
  // Always consume the state draw so both start rules see the same spell stream.
  const double u = stream_->uniform();
  next_blocked_ = start == StartRule::stationary && u < model_.blocked_fraction();
}

OnOffProcess::Spell OnOffProcess::next() {
  const bool blocked = next_blocked_;
  next_blocked_ = !next_blocked_;
  const double mean_s = (blocked ? model_.tcs_hours : model_.tcc_hours) * 3600.0;
  return {blocked, stream_->exponential(mean_s)};
}

bool WeatherPlan::has_site(std::string_view s) const {
  return intervals.find(std::string(s)) != intervals.end();
}

const std::vector<BlockedInterval>& WeatherPlan::site(std::string_view s) const {
  auto it = intervals.find(std::string(s));
  if (it == intervals.end()) throw ConfigError(fmt::format("unresolved weather site '{}'", s));
  return it->second;
}

bool WeatherPlan::is_blocked(std::string_view s, TimeMs t) const {
  const auto& list = site(s);
  auto it = std::upper_bound(list.begin(), list.end(), t,
                             [](TimeMs v, const BlockedInterval& b) { return v < b.start_ms; });
  if (it == list.begin()) return false;
  --it;
  return t >= it->start_ms && t < it->end_ms;
}

TimeMs WeatherPlan::blocked_ms(std::string_view s, TimeMs from, TimeMs to) const {
  TimeMs total = 0;
  for (const auto& b : site(s)) {
    const TimeMs lo = std::max(from, b.start_ms);
    const TimeMs hi = std::min(to, b.end_ms);
    if (hi > lo) total += hi - lo;
  }
  return total;
}

void WeatherPlan::validate() const {
  for (const auto& [id, list] : intervals) {
    TimeMs prev_end = -1;
    for (const auto& b : list) {
      if (b.site_id != id) throw InvariantError("weather plan: interval filed under wrong site");
      if (b.start_ms < 0 || b.start_ms >= b.end_ms || b.end_ms > horizon_ms)
        throw InvariantError(fmt::format("weather plan: bad interval for '{}'", id));
      if (b.start_ms < prev_end) throw InvariantError("weather plan: overlapping intervals");
      prev_end = b.end_ms;
    }
  }
}

std::vector<BlockedInterval> sample_weather_plan(const WeatherModel& model,
                                                 std::string_view site_id, TimeMs horizon_ms,
                                                 rng::Stream& stream, StartRule start) {
  if (horizon_ms <= 0) throw ConfigError("weather: horizon must be positive");
  OnOffProcess process(model, stream, start);
  std::vector<BlockedInterval> out;
  double t_s = 0.0;
  const double horizon_s = ms_to_seconds(horizon_ms);
  while (t_s < horizon_s) {
    const auto spell = process.next();
    const double end_s = t_s + spell.duration_s;
    if (spell.blocked) {
      const TimeMs lo = seconds_to_ms(t_s);
      const TimeMs hi = std::min(seconds_to_ms(end_s), horizon_ms);
      if (hi > lo) {
        // A clear spell shorter than half a millisecond rounds away; merge.
        if (!out.empty() && out.back().end_ms >= lo)
          out.back().end_ms = std::max(out.back().end_ms, hi);
        else
          out.push_back({std::string(site_id), lo, hi});
      }
    }
    t_s = end_s;
  }
  return out;
}

WeatherPlan sample_weather_plan(const WeatherModel& model, const std::vector<std::string>& sites,
                                TimeMs horizon_ms, std::uint64_t master_seed,
                                std::uint64_t replication, StartRule start) {
  WeatherPlan plan;
  plan.horizon_ms = horizon_ms;
  for (const auto& site : sites) {
    rng::Stream stream(rng::substream_seed(master_seed, site, replication));
    plan.intervals[site] = sample_weather_plan(model, site, horizon_ms, stream, start);
  }
  return plan;
}

std::string serialize_weather_plan(const WeatherPlan& plan) {
  std::string out;
  for (const auto& [id, list] : plan.intervals) out += fmt::format("site {}\n", id);
  for (const auto& [id, list] : plan.intervals)
    for (const auto& b : list)
      out += fmt::format("blocked {} {} {}\n", id, format_seconds(b.start_ms),
                         format_seconds(b.end_ms));
  return out;
}

WeatherPlan parse_weather_plan(std::string_view text, TimeMs horizon_ms) {
  WeatherPlan plan;
  plan.horizon_ms = horizon_ms;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto body = detail::strip_comment(lines[i]);
    if (body.empty()) continue;
    const auto tok = detail::split_ws(body);
    try {
      if (tok[0] == "site" && tok.size() == 2) {
        plan.intervals[std::string(tok[1])];
      } else if (tok[0] == "blocked" && tok.size() == 4) {
        BlockedInterval b{std::string(tok[1]), parse_seconds(tok[2]), parse_seconds(tok[3])};
        if (b.start_ms >= b.end_ms) throw ParseError(i + 1, "empty blocked interval");
        if (b.start_ms < 0 || b.end_ms > horizon_ms)
          throw ParseError(i + 1, "blocked interval outside horizon");
        plan.intervals[b.site_id].push_back(std::move(b));
      } else {
        throw ParseError(i + 1, fmt::format("malformed weather line '{}'", body));
      }
    } catch (const ParseError&) {
      throw;
    } catch (const ConfigError& e) {
      throw ParseError(i + 1, e.what());
    }
  }
  for (auto& [id, list] : plan.intervals) {
    std::sort(list.begin(), list.end(),
              [](const auto& a, const auto& b) { return a.start_ms < b.start_ms; });
    for (std::size_t k = 1; k < list.size(); ++k)
      if (list[k].start_ms < list[k - 1].end_ms)
        throw ConfigError(fmt::format("weather plan: overlapping intervals at site '{}'", id));
  }
  return plan;
}

}  // namespace hags::weather
