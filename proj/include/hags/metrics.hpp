#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hags/engine.hpp"

namespace hags::metrics {

struct DelayStats {
  double mean_s = 0;
  double max_s = 0;
};

struct BufferStats {
  double mean_pct = 0;
  double max_pct = 0;
};

struct MetricsRecord {
  double dr_pct = 0;
  std::optional<DelayStats> dd;  ///< absent when nothing was delivered
  std::optional<BufferStats> bo;  ///< platform tier; absent without platforms
  std::size_t n_delivered = 0;
};

struct CIStat {
  double mean = 0;
  double half_width_95 = 0;
  std::size_t n = 0;
};

double delivery_ratio(const engine::SimResult& result);
std::optional<DelayStats> delivery_delay_stats(const engine::SimResult& result);

/// Time-weighted mean and maximum of the summed buffer level of `nodes`
/// over [0, duration], as a percentage of all generated bits.
BufferStats buffer_occupation(const engine::SimResult& result, std::span<const std::string> nodes);
BufferStats buffer_occupation(const engine::SimResult& result, std::string_view node);

MetricsRecord summarize(const engine::SimResult& result);

CIStat ci95(std::span<const double> samples);

}  // namespace hags::metrics
