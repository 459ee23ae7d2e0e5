// One line per criterion: PASS or FAIL, the measured values and the bound.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "hags/harness.hpp"
#include "hags/rng.hpp"
#include "hags/weather.hpp"
#include "route_oracle.hpp"

using namespace hags;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances.
constexpr double kClearMeanRelTol = 0.02;
constexpr double kBlockedFracAbsTol = 0.01;
constexpr std::size_t kWeatherIntervals = 100'000;
constexpr double kWeatherSeconds = 10.0;
constexpr int kRouteInstances = 3000;
constexpr double kRouteSeconds = 30.0;
constexpr double kTrendDrFloor = 99.0;
constexpr double kTrendTcsDrop = 25.0;
constexpr double kTrendDdTccMax = 0.5;
constexpr double kTrendSeconds = 600.0;
constexpr double kBoTcs = 5.0;
constexpr double kDdTcs = 5.0;
constexpr double kBoLowMax = 70.0, kBoLowMean = 15.0;
constexpr double kBoHighMax = 20.0, kBoHighMean = 3.0;
constexpr double kBoHighTcc = 20.0;
constexpr std::size_t kMinEquivalency = 1000;

int failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void weather_statistics() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  const std::vector<std::pair<double, double>> pairs{{0.1, 5}, {5, 5}, {40, 25}};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const weather::WeatherModel m{pairs[i].first, pairs[i].second};
    // Long enough horizon for the requested number of clear spells, with margin.
    const double cycle_ms = (m.tcc_hours + m.tcs_hours) * 3.6e6;
    const auto horizon = static_cast<TimeMs>(cycle_ms * static_cast<double>(kWeatherIntervals) * 1.05);
    rng::Stream stream(rng::substream_seed(20240601, "GS1", i));
    const auto blocked = weather::sample_weather_plan(m, "GS1", horizon, stream);
    double clear_sum = 0;
    std::size_t clear_n = 0;
    TimeMs prev_end = 0, blocked_ms = 0;
    for (const auto& b : blocked) {
      if (b.start_ms > prev_end) {
        clear_sum += static_cast<double>(b.start_ms - prev_end);
        ++clear_n;
      }
      blocked_ms += b.end_ms - b.start_ms;
      prev_end = b.end_ms;
      if (clear_n >= kWeatherIntervals) break;
    }
    const double clear_mean_h = clear_sum / static_cast<double>(clear_n) / 3.6e6;
    const double frac = static_cast<double>(blocked_ms) / static_cast<double>(prev_end);
    const double rel = std::abs(clear_mean_h - m.tcc_hours) / m.tcc_hours;
    const double dfrac = std::abs(frac - m.blocked_fraction());
    ok = ok && clear_n >= kWeatherIntervals && rel <= kClearMeanRelTol && dfrac <= kBlockedFracAbsTol;
    detail += fmt::format("(TCC={},TCS={}) n={} clear_mean={:.4f}h err={:.2f}% blocked={:.4f} vs {:.4f}; ",
                          m.tcc_hours, m.tcs_hours, clear_n, clear_mean_h, 100 * rel, frac,
                          m.blocked_fraction());
  }
  const double s = seconds_since(t0);
  ok = ok && s < kWeatherSeconds;
  report(ok, "weather-statistics",
         detail + fmt::format("runtime={:.2f}s (tol clear 2%, fraction 0.01, <{}s)", s, kWeatherSeconds));
}

void routing_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(20240601);
  int mismatches = 0, routed = 0;
  for (int i = 0; i < kRouteInstances; ++i) {
    const auto inst = testing::random_instance(gen);
    const auto fast = testing::route_instance(inst);
    const auto slow = testing::brute_force_route(inst.plan, inst.residual, inst.src, inst.dsts, inst.t_now, inst.size);
    if (fast.has_value() != slow.has_value() || (fast && fast->best_delivery_ms != slow->delivery_ms)) ++mismatches;
    if (fast) ++routed;
  }
  const double s = seconds_since(t0);
  report(mismatches == 0 && s < kRouteSeconds, "routing-oracle",
         fmt::format("instances={} routed={} mismatches={} runtime={:.2f}s (<{}s)", kRouteInstances, routed,
                     mismatches, s, kRouteSeconds));
}

using Key = std::tuple<std::string, double, double>;  // scheme, tcc, tcs

std::map<Key, harness::AggregateRow> index(const std::vector<harness::AggregateRow>& rows) {
  std::map<Key, harness::AggregateRow> out;
  for (const auto& r : rows) out[{r.scheme, r.tcc_h, r.tcs_h}] = r;
  return out;
}

double v(const std::optional<double>& x) { return x.value_or(0.0); }

void trends(const harness::SweepGrid& grid, const std::vector<harness::AggregateRow>& aggs, double runtime_s) {
  const auto agg = index(aggs);
  // (a) DR non-decreasing in TCC within CI overlap.
  int a_bad = 0, a_checked = 0;
  std::string a_first;
  for (const auto& sch : grid.schemes())
    for (double tcs : grid.tcs_hours)
      for (std::size_t i = 0; i + 1 < grid.tcc_hours.size(); ++i) {
        const auto& lo = agg.at({sch.name(), grid.tcc_hours[i], tcs});
        const auto& hi = agg.at({sch.name(), grid.tcc_hours[i + 1], tcs});
        ++a_checked;
        if (v(hi.dr.mean) + v(hi.dr.ci95) < v(lo.dr.mean) - v(lo.dr.ci95)) {
          if (a_bad++ == 0)
            a_first = fmt::format(" first={} TCS={} TCC {}->{}", sch.name(), tcs, grid.tcc_hours[i], grid.tcc_hours[i + 1]);
        }
      }
  // (b) HAGS schemes keep DR at TCS = 5 h.
  double b_min = 100;
  std::string b_where;
  for (const auto& sch : grid.schemes()) {
    if (sch.n_hags == 0) continue;
    for (double tcc : grid.tcc_hours) {
      const double dr = v(agg.at({sch.name(), tcc, 5.0}).dr.mean);
      if (dr < b_min) {
        b_min = dr;
        b_where = fmt::format("{} TCC={}", sch.name(), tcc);
      }
    }
  }
  // (c) one ground station loses DR as clear spells shorten.
  const double c5 = v(agg.at({"1LEO-1GS", 5.0, 5.0}).dr.mean);
  const double c25 = v(agg.at({"1LEO-1GS", 5.0, 25.0}).dr.mean);
  // (d) HAGS delay no worse than the same number of stations.
  int d_bad = 0, d_checked = 0;
  std::string d_detail;
  for (int n : grid.gs_counts) {
    if (std::find(grid.hags_counts.begin(), grid.hags_counts.end(), n) == grid.hags_counts.end()) continue;
    for (double tcc : grid.tcc_hours) {
      if (tcc > kTrendDdTccMax) continue;
      const auto& h = agg.at({harness::Scheme{n, n}.name(), tcc, kDdTcs});
      const auto& g = agg.at({harness::Scheme{n, 0}.name(), tcc, kDdTcs});
      ++d_checked;
      const bool ok = h.dd_mean.mean && (!g.dd_mean.mean || *h.dd_mean.mean <= *g.dd_mean.mean);
      if (!ok) ++d_bad;
      d_detail += fmt::format(" n={} TCC={}: {:.0f}s vs {}", n, tcc, v(h.dd_mean.mean),
                              g.dd_mean.mean ? fmt::format("{:.0f}s", *g.dd_mean.mean) : "none");
    }
  }
  const bool ok_a = a_bad == 0;
  const bool ok_b = b_min >= kTrendDrFloor;
  const bool ok_c = c5 - c25 >= kTrendTcsDrop;
  const bool ok_d = d_bad == 0 && d_checked > 0;
  const bool ok_t = runtime_s < kTrendSeconds;
  report(ok_a && ok_b && ok_c && ok_d && ok_t, "trend-reproduction",
         fmt::format("(a) {}/{} TCC steps outside CI overlap{} [{}]; "
                     "(b) min HAGS DR at TCS=5h = {:.2f}% at {} (>= {}) [{}]; "
                     "(c) 1GS TCC=5h DR {:.1f}% -> {:.1f}% drop {:.1f} (>= {}) [{}]; "
                     "(d) TCS={}h{} [{}]; sweep runtime={:.1f}s (<{}s)",
                     a_bad, a_checked, a_first, ok_a ? "ok" : "fail", b_min, b_where, kTrendDrFloor,
                     ok_b ? "ok" : "fail", c5, c25, c5 - c25, kTrendTcsDrop, ok_c ? "ok" : "fail", kDdTcs,
                     d_detail, ok_d ? "ok" : "fail", runtime_s, kTrendSeconds));
}

void buffer_bracket(const harness::SweepGrid& grid, const std::vector<harness::AggregateRow>& aggs) {
  const auto agg = index(aggs);
  const std::string one = harness::Scheme{1, 1}.name();
  const double low = *std::min_element(grid.tcc_hours.begin(), grid.tcc_hours.end());
  const auto& l = agg.at({one, low, kBoTcs});
  bool ok = v(l.bo_max.mean) <= kBoLowMax && v(l.bo_mean.mean) <= kBoLowMean;
  std::string detail = fmt::format("TCS={}h TCC={}h max={:.2f}% (<= {}) mean={:.2f}% (<= {})", kBoTcs, low,
                                   v(l.bo_max.mean), kBoLowMax, v(l.bo_mean.mean), kBoLowMean);
  int high_n = 0;
  for (double tcc : grid.tcc_hours) {
    if (tcc <= kBoHighTcc) continue;
    const auto& h = agg.at({one, tcc, kBoTcs});
    ++high_n;
    ok = ok && v(h.bo_max.mean) <= kBoHighMax && v(h.bo_mean.mean) <= kBoHighMean;
    detail += fmt::format("; TCC={}h max={:.2f}% (<= {}) mean={:.2f}% (<= {})", tcc, v(h.bo_max.mean), kBoHighMax,
                          v(h.bo_mean.mean), kBoHighMean);
  }
  report(ok && high_n > 0, "buffer-occupation-bracket", detail);
}

void equivalency(const std::vector<harness::ResultRow>& rows) {
  const auto pts = harness::extract_equivalency_points(rows);
  std::size_t bad = 0, dr = 0;
  for (const auto& p : pts) {
    if (!harness::revalidate(p, rows)) ++bad;
    if (p.metric == harness::Metric::dr) ++dr;
  }
  report(pts.size() >= kMinEquivalency && bad == 0, "equivalency-extraction",
         fmt::format("points={} (DR {}, DD {}) failed_revalidation={} (>= {})", pts.size(), dr, pts.size() - dr, bad,
                     kMinEquivalency));
}

}  // namespace

int main() {
  weather_statistics();
  routing_oracle();

  const auto grid = harness::load_grid(std::string(HAGS_DATA_DIR) + "/grids/desk.cfg");
  const std::uint64_t seed = grid.base.seed;

  harness::SweepOptions serial;
  const auto t0 = Clock::now();
  const auto a = harness::run_sweep(grid, seed, serial);
  const double sweep_s = seconds_since(t0);

  harness::SweepOptions wide;
  wide.jobs = 8;
  const auto b = harness::run_sweep(grid, seed, wide);
  const auto c = harness::run_sweep(grid, seed, serial);
  const auto csv_a = harness::results_csv(a.rows);
  const bool same_runs = csv_a == harness::results_csv(c.rows);
  const bool same_jobs = csv_a == harness::results_csv(b.rows);
  report(same_runs && same_jobs, "determinism",
         fmt::format("cells={} bytes={} repeat={} jobs1_vs_jobs8={}", a.rows.size(), csv_a.size(),
                     same_runs ? "identical" : "differs", same_jobs ? "identical" : "differs"));

  trends(grid, a.aggregates, sweep_s);
  buffer_bracket(grid, a.aggregates);
  equivalency(a.rows);

  harness::SweepOptions checked;
  checked.check_conservation = true;
  checked.jobs = 8;
  std::string what;
  bool conserved = true;
  const auto t1 = Clock::now();
  try {
    const auto d = harness::run_sweep(grid, seed, checked);
    conserved = harness::results_csv(d.rows) == csv_a;
    if (!conserved) what = "checked sweep produced different results";
  } catch (const std::exception& e) {
    conserved = false;
    what = e.what();
  }
  report(conserved, "conservation",
         fmt::format("cells={} checked after every event{} runtime={:.1f}s", grid.cell_count(),
                     what.empty() ? "" : " error=" + what, seconds_since(t1)));

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
