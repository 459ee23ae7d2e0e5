#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hags/scenario.hpp"

namespace hags::harness {

/// A scheme draws its stations from the front of the site catalogue.
/// n_hags > 0 puts a platform over each of the n_hags stations it uses.
struct Scheme {
  int n_gs = 1;
  int n_hags = 0;

  std::string name() const;
  ScenarioConfig apply(const ScenarioConfig& base) const;
  friend bool operator==(const Scheme&, const Scheme&) = default;
};

struct SweepGrid {
  ScenarioConfig base;
  std::vector<int> gs_counts;
  std::vector<int> hags_counts;
  std::vector<double> tcc_hours;
  std::vector<double> tcs_hours;
  int replications = 0;

  std::vector<Scheme> schemes() const;
  std::size_t cell_count() const;
  void validate() const;  ///< "empty grid" when any axis is empty
};

/// Key-value grid file: scenario, gs_counts, hags_counts, tcc_hours,
/// tcs_hours, replications. `scenario` is relative to the grid file.
SweepGrid parse_grid(std::string_view text, const std::filesystem::path& base_dir = {});
SweepGrid load_grid(const std::filesystem::path& path);

struct ResultRow {
  std::string scheme;
  int n_gs = 0;
  int n_hags = 0;
  double tcc_h = 0;
  double tcs_h = 0;
  int rep = 0;
  double dr_pct = 0;
  std::optional<double> dd_mean_s, dd_max_s;
  std::optional<double> bo_mean_pct, bo_max_pct;
};

struct AggregateRow {
  std::string scheme;
  int n_gs = 0;
  int n_hags = 0;
  double tcc_h = 0;
  double tcs_h = 0;
  int n_reps = 0;
  struct Stat {
    std::optional<double> mean, ci95;
    int n = 0;
  };
  Stat dr, dd_mean, dd_max, bo_mean, bo_max;
};

struct SweepOptions {
  int jobs = 1;
  bool check_conservation = false;
  /// Called after each finished cell with (done, total); may run on any thread.
  std::function<void(std::size_t, std::size_t)> progress;
};

struct SweepOutput {
  std::vector<ResultRow> rows;
  std::vector<AggregateRow> aggregates;
};

/// Runs every scheme x TCC x TCS x replication cell. Rows come out in that
/// nesting order whatever the degree of parallelism.
SweepOutput run_sweep(const SweepGrid& grid, std::uint64_t master_seed,
                      const SweepOptions& options = {});

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows);

std::string results_csv(const std::vector<ResultRow>& rows);
std::string aggregates_csv(const std::vector<AggregateRow>& rows);
std::vector<ResultRow> parse_results_csv(std::string_view text);

enum class Metric { dr, dd };
std::string_view to_string(Metric m);

struct EquivalencyPoint {
  Metric metric = Metric::dr;
  int n_hags = 0;
  int n_gs = 0;
  double tcc_h = 0;
  double tcs_h = 0;
  int rep = 0;
  friend bool operator==(const EquivalencyPoint&, const EquivalencyPoint&) = default;
};

/// TCC values where a platform scheme's metric curve meets a ground-only
/// scheme's, per replication and TCS. Curves are linear between grid
/// samples; DD is compared only on segments where both schemes delivered
/// everything at both ends.
std::vector<EquivalencyPoint> extract_equivalency_points(const std::vector<ResultRow>& rows);

/// Re-derives `p` from the table: either a grid sample with equal values
/// or an interpolated root between samples whose difference changes sign.
bool revalidate(const EquivalencyPoint& p, const std::vector<ResultRow>& rows);

std::string equivalency_csv(const std::vector<EquivalencyPoint>& points);
std::vector<EquivalencyPoint> parse_equivalency_csv(std::string_view text);

}  // namespace hags::harness
