#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hags/core.hpp"
#include "hags/plan.hpp"
#include "hags/scenario.hpp"
#include "hags/weather.hpp"

namespace hags::engine {

/// Piecewise-constant buffer level. Holds one point per time at which the
/// level changed, so two runs with the same history compare equal no
/// matter how many intermediate same-instant updates each performed.
class StepSeries {
 public:
  struct Point {
    TimeMs t_ms;
    Bits bits;
    friend bool operator==(const Point&, const Point&) = default;
  };

  StepSeries() : points_{{0, 0}} {}
  void set(TimeMs t, Bits bits);
  void add(TimeMs t, Bits delta) { set(t, current() + delta); }
  Bits current() const { return points_.back().bits; }
  const std::vector<Point>& points() const { return points_; }

  friend bool operator==(const StepSeries&, const StepSeries&) = default;

 private:
  std::vector<Point> points_;
};

struct BundleRecord {
  std::string bundle_id;
  Bits size_bits = 0;
  TimeMs t_gen_ms = 0;
  std::optional<TimeMs> delivered_at_ms;
  /// Nodes in the order any piece of the bundle first reached them.
  std::vector<std::string> custodian_path;
  bool dropped = false;

  friend bool operator==(const BundleRecord&, const BundleRecord&) = default;
};

/// One completed or cut-short transmission (kept only on request).
struct Transmission {
  std::string contact_id;
  std::string tx, rx;
  TimeMs start_ms = 0;
  TimeMs end_ms = 0;
  Bits bits = 0;
};

struct SimResult {
  std::uint64_t replication = 0;
  std::uint64_t seed = 0;
  TimeMs duration_ms = 0;
  std::vector<std::pair<std::string, std::string>> scenario;
  std::vector<BundleRecord> bundles;
  /// Buffered bits per node over the run. Destination stations stay at 0.
  std::map<std::string, StepSeries> bo_series;
  std::vector<std::string> hags_nodes;
  Bits generated_bits = 0;
  Bits dropped_bits = 0;
  std::string event_log;
  std::vector<Transmission> transmissions;

  std::size_t generated() const { return bundles.size(); }
  std::size_t delivered() const;
};

struct RunOptions {
  bool record_log = true;
  bool record_transmissions = false;
  /// Check bit and bundle conservation after every event; throws
  /// InvariantError on the first violation.
  bool check_conservation = false;
};

/// Runs one replication. `contacts` is the geometric plan; in oracle mode
/// it is carved by `weather` before anything else happens. Mismatched
/// inputs raise ConfigError before the clock starts.
SimResult run(const ScenarioConfig& scenario, const plan::ContactPlan& contacts,
              const weather::WeatherPlan& weather, std::uint64_t replication,
              const RunOptions& options = {});

/// Rebuilds the bundle records and buffer series from an event log.
SimResult replay(const ScenarioConfig& scenario, std::string_view event_log);

/// JSON document with fields replication, seed, duration_s, scenario,
/// bundles[] {bundle_id, size_bits, t_gen_s, delivered_at_s, custodian_path,
/// dropped} and bo_series {node: [[t_s, bits], ...]}.
std::string result_to_json(const SimResult& result);

}  // namespace hags::engine
