#include "hags/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace hags::metrics {

double delivery_ratio(const engine::SimResult& result) {
  if (result.generated() == 0) throw ConfigError("empty traffic");
  return 100.0 * static_cast<double>(result.delivered()) / static_cast<double>(result.generated());
}

std::optional<DelayStats> delivery_delay_stats(const engine::SimResult& result) {
  double sum = 0;
  TimeMs worst = 0;
  std::size_t n = 0;
  for (const auto& b : result.bundles) {
    if (!b.delivered_at_ms) continue;
    const TimeMs dd = *b.delivered_at_ms - b.t_gen_ms;
    if (dd < 0)
      throw InvariantError(fmt::format("bundle {} delivered before it was generated", b.bundle_id));
    sum += ms_to_seconds(dd);
    worst = std::max(worst, dd);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return DelayStats{sum / static_cast<double>(n), ms_to_seconds(worst)};
}

BufferStats buffer_occupation(const engine::SimResult& result, std::span<const std::string> nodes) {
  // Merge the step series into one summed level.
  std::vector<std::pair<TimeMs, Bits>> deltas;
  for (const auto& node : nodes) {
    auto it = result.bo_series.find(node);
    if (it == result.bo_series.end()) throw ConfigError(fmt::format("unknown node '{}'", node));
    Bits prev = 0;
    for (const auto& p : it->second.points()) {
      deltas.emplace_back(p.t_ms, p.bits - prev);
      prev = p.bits;
    }
  }
  std::stable_sort(deltas.begin(), deltas.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  const TimeMs horizon = result.duration_ms;
  long double area = 0;
  Bits level = 0, peak = 0;
  TimeMs t = 0;
  for (std::size_t i = 0; i < deltas.size();) {
    const TimeMs at = std::min(deltas[i].first, horizon);
    area += static_cast<long double>(level) * static_cast<long double>(at - t);
    t = at;
    if (deltas[i].first > horizon) break;
    for (; i < deltas.size() && deltas[i].first == at; ++i) level += deltas[i].second;
    peak = std::max(peak, level);
  }
  if (t < horizon) area += static_cast<long double>(level) * static_cast<long double>(horizon - t);

  if (result.generated_bits == 0 || horizon == 0) return {};
  const long double total = static_cast<long double>(result.generated_bits);
  return {static_cast<double>(100.0L * area / (total * static_cast<long double>(horizon))),
          static_cast<double>(100.0L * static_cast<long double>(peak) / total)};
}

BufferStats buffer_occupation(const engine::SimResult& result, std::string_view node) {
  const std::string n(node);
  return buffer_occupation(result, std::span<const std::string>(&n, 1));
}

MetricsRecord summarize(const engine::SimResult& result) {
  MetricsRecord m;
  m.dr_pct = delivery_ratio(result);
  m.dd = delivery_delay_stats(result);
  m.n_delivered = result.delivered();
  if (!result.hags_nodes.empty()) m.bo = buffer_occupation(result, result.hags_nodes);
  return m;
}

CIStat ci95(std::span<const double> samples) {
  if (samples.size() < 2) throw ConfigError("insufficient samples");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double s = std::sqrt(ss / (n - 1));
  return {mean, 1.96 * s / std::sqrt(n), samples.size()};
}

}  // namespace hags::metrics
