#include "hags/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "hags/engine.hpp"
#include "hags/metrics.hpp"
#include "text_util.hpp"

namespace hags::harness {

std::string Scheme::name() const {
  if (n_hags == 0) return fmt::format("1LEO-{}GS", n_gs);
  return fmt::format("1LEO-{}HAGS-{}GS", n_hags, n_gs);
}

ScenarioConfig Scheme::apply(const ScenarioConfig& base) const {
  if (n_gs < 1 || n_hags < 0 || n_hags > n_gs)
    throw ConfigError(fmt::format("invalid scheme {}", name()));
  if (static_cast<std::size_t>(n_gs) > base.sites.size())
    throw ConfigError(fmt::format("scheme {} needs {} sites, catalogue has {}", name(), n_gs,
                                  base.sites.size()));
  ScenarioConfig s = base;
  s.gs_sites.clear();
  s.hags_over.clear();
  for (int i = 0; i < n_gs; ++i) s.gs_sites.push_back(base.sites[static_cast<std::size_t>(i)].site_id);
  for (int i = 0; i < n_hags; ++i) s.hags_over.push_back(s.gs_sites[static_cast<std::size_t>(i)]);
  return s;
}

std::vector<Scheme> SweepGrid::schemes() const {
  std::vector<Scheme> out;
  for (int n : gs_counts) out.push_back({n, 0});
  for (int n : hags_counts) out.push_back({n, n});
  return out;
}

std::size_t SweepGrid::cell_count() const {
  return (gs_counts.size() + hags_counts.size()) * tcc_hours.size() * tcs_hours.size() *
         static_cast<std::size_t>(std::max(replications, 0));
}

void SweepGrid::validate() const {
  if (gs_counts.empty() && hags_counts.empty()) throw ConfigError("empty grid");
  if (tcc_hours.empty() || tcs_hours.empty() || replications <= 0) throw ConfigError("empty grid");
  for (int n : gs_counts)
    if (n < 1) throw ConfigError("gs_counts must be >= 1");
  for (int n : hags_counts)
    if (n < 1) throw ConfigError("hags_counts must be >= 1");
  for (double v : tcc_hours)
    if (!(v > 0)) throw ConfigError("tcc_hours must be positive");
  for (double v : tcs_hours)
    if (!(v > 0)) throw ConfigError("tcs_hours must be positive");
  for (const auto& s : schemes()) s.apply(base);
}

SweepGrid parse_grid(std::string_view text, const std::filesystem::path& base_dir) {
  SweepGrid g;
  std::optional<std::filesystem::path> scenario;
  bool any = false;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto body = detail::strip_comment(lines[i]);
    if (body.empty()) continue;
    any = true;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(i + 1, fmt::format("expected 'key = value', got '{}'", body));
    const std::string key(detail::trim(body.substr(0, eq)));
    const auto value = detail::trim(body.substr(eq + 1));
    auto ints = [&] {
      std::vector<int> v;
      for (const auto& item : detail::split_list(value)) v.push_back(detail::parse_number<int>(item, key));
      return v;
    };
    auto reals = [&] {
      std::vector<double> v;
      for (const auto& item : detail::split_list(value))
        v.push_back(detail::parse_number<double>(item, key));
      return v;
    };
    try {
      if (key == "scenario") scenario = std::filesystem::path(std::string(value));
      else if (key == "gs_counts") g.gs_counts = ints();
      else if (key == "hags_counts") g.hags_counts = ints();
      else if (key == "tcc_hours") g.tcc_hours = reals();
      else if (key == "tcs_hours") g.tcs_hours = reals();
      else if (key == "replications") g.replications = detail::parse_number<int>(value, key);
      else throw ConfigError(fmt::format("unknown key '{}'", key));
    } catch (const ConfigError& e) {
      throw ParseError(i + 1, e.what());
    }
  }
  if (!any) throw ConfigError("empty grid");
  if (scenario) {
    if (scenario->is_relative()) *scenario = base_dir / *scenario;
    g.base = load_scenario(*scenario);
  }
  g.validate();
  return g;
}

SweepGrid load_grid(const std::filesystem::path& path) {
  return parse_grid(read_text_file(path), path.parent_path());
}

namespace {

struct Cell {
  std::size_t scheme;
  double tcc, tcs;
  int rep;
};

ResultRow to_row(const Scheme& s, const Cell& c, const metrics::MetricsRecord& m) {
  ResultRow r;
  r.scheme = s.name();
  r.n_gs = s.n_gs;
  r.n_hags = s.n_hags;
  r.tcc_h = c.tcc;
  r.tcs_h = c.tcs;
  r.rep = c.rep;
  r.dr_pct = m.dr_pct;
  if (m.dd) {
    r.dd_mean_s = m.dd->mean_s;
    r.dd_max_s = m.dd->max_s;
  }
  if (m.bo) {
    r.bo_mean_pct = m.bo->mean_pct;
    r.bo_max_pct = m.bo->max_pct;
  }
  return r;
}

}  // namespace

SweepOutput run_sweep(const SweepGrid& grid, std::uint64_t master_seed, const SweepOptions& options) {
  grid.validate();
  ScenarioConfig base = grid.base;
  base.seed = master_seed;

  const auto schemes = grid.schemes();
  const plan::ContactPlan universe = universe_plan(base);
  std::vector<ScenarioConfig> configs;
  std::vector<plan::ContactPlan> plans;
  for (const auto& s : schemes) {
    configs.push_back(s.apply(base));
    plans.push_back(restrict_plan(universe, configs.back()));
  }

  std::vector<Cell> cells;
  for (std::size_t s = 0; s < schemes.size(); ++s)
    for (double tcc : grid.tcc_hours)
      for (double tcs : grid.tcs_hours)
        for (int rep = 0; rep < grid.replications; ++rep) cells.push_back({s, tcc, tcs, rep});

  std::vector<ResultRow> rows(cells.size());
  std::atomic<std::size_t> next{0}, done{0};
  std::atomic<bool> failed{false};
  std::mutex err_mu;
  std::size_t err_cell = cells.size();
  std::exception_ptr err;

  engine::RunOptions ro;
  ro.record_log = false;
  ro.check_conservation = options.check_conservation;

  auto worker = [&] {
    for (std::size_t i; !failed && (i = next++) < cells.size();) {
      const Cell& c = cells[i];
      try {
        ScenarioConfig sc = configs[c.scheme];
        sc.weather.tcc_hours = c.tcc;
        sc.weather.tcs_hours = c.tcs;
        const auto wx = weather_plan(sc, static_cast<std::uint64_t>(c.rep));
        const auto res = engine::run(sc, plans[c.scheme], wx, static_cast<std::uint64_t>(c.rep), ro);
        rows[i] = to_row(schemes[c.scheme], c, metrics::summarize(res));
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (i < err_cell) {
          err_cell = i;
          err = std::current_exception();
        }
        failed = true;
      }
      const std::size_t n = ++done;
      if (options.progress) options.progress(n, cells.size());
    }
  };

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (err) {
    const Cell& c = cells[err_cell];
    const auto where = fmt::format("cell {} tcc={} tcs={} rep={}", schemes[c.scheme].name(), c.tcc,
                                   c.tcs, c.rep);
    try {
      std::rethrow_exception(err);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}: {}", where, e.what()));
    } catch (const InvariantError& e) {
      throw InvariantError(fmt::format("{}: {}", where, e.what()));
    } catch (const std::exception& e) {
      throw Error(fmt::format("{}: {}", where, e.what()));
    }
  }

  SweepOutput out;
  out.rows = std::move(rows);
  out.aggregates = aggregate(out.rows);
  return out;
}

namespace {

using GroupKey = std::tuple<int, int, double, double>;  // n_hags, n_gs, tcc, tcs

AggregateRow::Stat stat_of(const std::vector<double>& v) {
  AggregateRow::Stat s;
  s.n = static_cast<int>(v.size());
  if (v.empty()) return s;
  if (v.size() == 1) {
    s.mean = v[0];
    return s;
  }
  const auto ci = metrics::ci95(v);
  s.mean = ci.mean;
  s.ci95 = ci.half_width_95;
  return s;
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
  std::vector<GroupKey> order;
  std::map<GroupKey, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) {
    GroupKey k{r.n_hags, r.n_gs, r.tcc_h, r.tcs_h};
    auto [it, inserted] = groups.try_emplace(k);
    if (inserted) order.push_back(k);
    it->second.push_back(&r);
  }
  std::vector<AggregateRow> out;
  for (const auto& k : order) {
    const auto& g = groups[k];
    AggregateRow a;
    a.scheme = g.front()->scheme;
    a.n_gs = g.front()->n_gs;
    a.n_hags = g.front()->n_hags;
    a.tcc_h = g.front()->tcc_h;
    a.tcs_h = g.front()->tcs_h;
    a.n_reps = static_cast<int>(g.size());
    std::vector<double> dr, ddm, ddx, bom, box;
    for (const auto* r : g) {
      dr.push_back(r->dr_pct);
      if (r->dd_mean_s) ddm.push_back(*r->dd_mean_s);
      if (r->dd_max_s) ddx.push_back(*r->dd_max_s);
      if (r->bo_mean_pct) bom.push_back(*r->bo_mean_pct);
      if (r->bo_max_pct) box.push_back(*r->bo_max_pct);
    }
    a.dr = stat_of(dr);
    a.dd_mean = stat_of(ddm);
    a.dd_max = stat_of(ddx);
    a.bo_mean = stat_of(bom);
    a.bo_max = stat_of(box);
    out.push_back(std::move(a));
  }
  return out;
}

namespace {

constexpr std::string_view kResultsHeader =
    "scheme,n_gs,n_hags,tcc_h,tcs_h,rep,dr_pct,dd_mean_s,dd_max_s,bo_mean_pct,bo_max_pct";
constexpr std::string_view kAggregatesHeader =
    "scheme,n_gs,n_hags,tcc_h,tcs_h,n_reps,dr_mean,dr_ci95,dd_mean_s_mean,dd_mean_s_ci95,"
    "dd_mean_s_n,dd_max_s_mean,dd_max_s_ci95,bo_mean_pct_mean,bo_mean_pct_ci95,"
    "bo_max_pct_mean,bo_max_pct_ci95";
constexpr std::string_view kEquivalencyHeader = "metric,n_hags,n_gs,tcc_h,tcs_h,rep";

std::string opt(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : ""; }

std::optional<double> parse_opt(std::string_view s, std::string_view what) {
  if (s.empty()) return std::nullopt;
  return detail::parse_number<double>(s, what);
}

std::vector<std::string> csv_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto end = line.find(',', start);
    if (end == std::string_view::npos) {
      out.emplace_back(detail::trim(line.substr(start)));
      return out;
    }
    out.emplace_back(detail::trim(line.substr(start, end - start)));
    start = end + 1;
  }
}

template <class F>
void for_each_record(std::string_view text, std::string_view header, std::size_t width, F&& f) {
  const auto lines = detail::split_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && detail::trim(lines[i]).empty()) ++i;
  if (i == lines.size() || detail::trim(lines[i]) != header)
    throw ConfigError(fmt::format("expected CSV header '{}'", header));
  for (++i; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    auto fields = csv_fields(lines[i]);
    if (fields.size() != width)
      throw ParseError(i + 1, fmt::format("expected {} fields, got {}", width, fields.size()));
    try {
      f(fields);
    } catch (const ParseError&) {
      throw;
    } catch (const ConfigError& e) {
      throw ParseError(i + 1, e.what());
    }
  }
}

}  // namespace

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::string out(kResultsHeader);
  out += '\n';
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.scheme, r.n_gs, r.n_hags, r.tcc_h,
                       r.tcs_h, r.rep, r.dr_pct, opt(r.dd_mean_s), opt(r.dd_max_s),
                       opt(r.bo_mean_pct), opt(r.bo_max_pct));
  return out;
}

std::string aggregates_csv(const std::vector<AggregateRow>& rows) {
  std::string out(kAggregatesHeader);
  out += '\n';
  for (const auto& a : rows)
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", a.scheme, a.n_gs,
                       a.n_hags, a.tcc_h, a.tcs_h, a.n_reps, opt(a.dr.mean), opt(a.dr.ci95),
                       opt(a.dd_mean.mean), opt(a.dd_mean.ci95), a.dd_mean.n, opt(a.dd_max.mean),
                       opt(a.dd_max.ci95), opt(a.bo_mean.mean), opt(a.bo_mean.ci95),
                       opt(a.bo_max.mean), opt(a.bo_max.ci95));
  return out;
}

std::vector<ResultRow> parse_results_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  for_each_record(text, kResultsHeader, 11, [&](const std::vector<std::string>& f) {
    ResultRow r;
    r.scheme = f[0];
    r.n_gs = detail::parse_number<int>(f[1], "n_gs");
    r.n_hags = detail::parse_number<int>(f[2], "n_hags");
    r.tcc_h = detail::parse_number<double>(f[3], "tcc_h");
    r.tcs_h = detail::parse_number<double>(f[4], "tcs_h");
    r.rep = detail::parse_number<int>(f[5], "rep");
    r.dr_pct = detail::parse_number<double>(f[6], "dr_pct");
    r.dd_mean_s = parse_opt(f[7], "dd_mean_s");
    r.dd_max_s = parse_opt(f[8], "dd_max_s");
    r.bo_mean_pct = parse_opt(f[9], "bo_mean_pct");
    r.bo_max_pct = parse_opt(f[10], "bo_max_pct");
    rows.push_back(std::move(r));
  });
  return rows;
}

std::string_view to_string(Metric m) { return m == Metric::dr ? "DR" : "DD"; }

std::string equivalency_csv(const std::vector<EquivalencyPoint>& points) {
  std::string out(kEquivalencyHeader);
  out += '\n';
  for (const auto& p : points)
    out += fmt::format("{},{},{},{},{},{}\n", to_string(p.metric), p.n_hags, p.n_gs, p.tcc_h,
                       p.tcs_h, p.rep);
  return out;
}

std::vector<EquivalencyPoint> parse_equivalency_csv(std::string_view text) {
  std::vector<EquivalencyPoint> points;
  for_each_record(text, kEquivalencyHeader, 6, [&](const std::vector<std::string>& f) {
    EquivalencyPoint p;
    if (f[0] == "DR") p.metric = Metric::dr;
    else if (f[0] == "DD") p.metric = Metric::dd;
    else throw ConfigError(fmt::format("unknown metric '{}'", f[0]));
    p.n_hags = detail::parse_number<int>(f[1], "n_hags");
    p.n_gs = detail::parse_number<int>(f[2], "n_gs");
    p.tcc_h = detail::parse_number<double>(f[3], "tcc_h");
    p.tcs_h = detail::parse_number<double>(f[4], "tcs_h");
    p.rep = detail::parse_number<int>(f[5], "rep");
    points.push_back(p);
  });
  return points;
}

namespace {

/// Both schemes' samples on their shared TCC grid.
struct PairedCurve {
  std::vector<double> x;
  std::vector<const ResultRow*> h, g;
};

using CurveKey = std::tuple<int, int, double, int>;  // n_hags, n_gs, tcs, rep

std::map<CurveKey, std::map<double, const ResultRow*>> index_rows(const std::vector<ResultRow>& rows) {
  std::map<CurveKey, std::map<double, const ResultRow*>> idx;
  for (const auto& r : rows) {
    auto [it, inserted] = idx[{r.n_hags, r.n_gs, r.tcs_h, r.rep}].emplace(r.tcc_h, &r);
    if (!inserted)
      throw ConfigError(fmt::format("duplicate results row for {} tcc={} tcs={} rep={}", r.scheme,
                                    r.tcc_h, r.tcs_h, r.rep));
  }
  return idx;
}

PairedCurve pair_curves(const std::map<double, const ResultRow*>& h,
                        const std::map<double, const ResultRow*>& g) {
  PairedCurve c;
  for (const auto& [x, row] : h) {
    auto it = g.find(x);
    if (it == g.end()) continue;
    c.x.push_back(x);
    c.h.push_back(row);
    c.g.push_back(it->second);
  }
  return c;
}

double value(const ResultRow& r, Metric m) { return m == Metric::dr ? r.dr_pct : *r.dd_mean_s; }

bool segment_ok(const PairedCurve& c, std::size_t i, Metric m) {
  if (i + 1 >= c.x.size()) return false;
  if (m == Metric::dr) return true;
  for (std::size_t j : {i, i + 1})
    if (c.h[j]->dr_pct != 100.0 || c.g[j]->dr_pct != 100.0 || !c.h[j]->dd_mean_s ||
        !c.g[j]->dd_mean_s)
      return false;
  return true;
}

double diff(const PairedCurve& c, std::size_t i, Metric m) {
  return value(*c.h[i], m) - value(*c.g[i], m);
}

double root(double x0, double x1, double d0, double d1) { return x0 + (x1 - x0) * d0 / (d0 - d1); }

std::vector<double> crossings(const PairedCurve& c, Metric m) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < c.x.size(); ++i) {
    if (!segment_ok(c, i, m)) continue;
    const double d0 = diff(c, i, m), d1 = diff(c, i + 1, m);
    if (d0 == 0) out.push_back(c.x[i]);
    else if (d1 != 0 && (d0 < 0) != (d1 < 0)) out.push_back(root(c.x[i], c.x[i + 1], d0, d1));
    if (d1 == 0 && d0 != 0 && !segment_ok(c, i + 1, m)) out.push_back(c.x[i + 1]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<EquivalencyPoint> extract_equivalency_points(const std::vector<ResultRow>& rows) {
  const auto idx = index_rows(rows);
  std::set<int> hags_counts, gs_counts;
  std::set<std::pair<double, int>> tcs_rep;
  for (const auto& [key, curve] : idx) {
    const auto& [n_hags, n_gs, tcs, rep] = key;
    if (n_hags > 0) hags_counts.insert(n_hags);
    else gs_counts.insert(n_gs);
    tcs_rep.insert({tcs, rep});
  }
  std::vector<EquivalencyPoint> out;
  for (const auto& [tcs, rep] : tcs_rep)
    for (Metric m : {Metric::dr, Metric::dd})
      for (int nh : hags_counts)
        for (int ng : gs_counts) {
          auto h = idx.find({nh, nh, tcs, rep});
          auto g = idx.find({0, ng, tcs, rep});
          if (h == idx.end() || g == idx.end()) continue;
          for (double x : crossings(pair_curves(h->second, g->second), m))
            out.push_back({m, nh, ng, x, tcs, rep});
        }
  // Metric, pair, TCS, replication, TCC.
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.metric, a.n_hags, a.n_gs, a.tcs_h, a.rep) <
           std::tie(b.metric, b.n_hags, b.n_gs, b.tcs_h, b.rep);
  });
  return out;
}

bool revalidate(const EquivalencyPoint& p, const std::vector<ResultRow>& rows) {
  std::map<double, const ResultRow*> h, g;
  for (const auto& r : rows) {
    if (r.tcs_h != p.tcs_h || r.rep != p.rep) continue;
    if (r.n_hags == p.n_hags && r.n_gs == p.n_hags) h.emplace(r.tcc_h, &r);
    if (r.n_hags == 0 && r.n_gs == p.n_gs) g.emplace(r.tcc_h, &r);
  }
  const auto c = pair_curves(h, g);
  for (std::size_t i = 0; i + 1 < c.x.size(); ++i) {
    if (!segment_ok(c, i, p.metric)) continue;
    const double d0 = diff(c, i, p.metric), d1 = diff(c, i + 1, p.metric);
    if (p.tcc_h == c.x[i] && d0 == 0) return true;
    if (p.tcc_h == c.x[i + 1] && d1 == 0) return true;
    if (p.tcc_h > c.x[i] && p.tcc_h < c.x[i + 1] && d0 * d1 < 0) {
      const double x = root(c.x[i], c.x[i + 1], d0, d1);
      if (std::abs(x - p.tcc_h) <= 1e-9 * std::max(1.0, std::abs(x))) return true;
    }
  }
  return false;
}

}  // namespace hags::harness
