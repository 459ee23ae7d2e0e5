// Command-line front end: contact and weather plan generation, single runs,
// sweeps and equivalency extraction.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hags/engine.hpp"
#include "hags/harness.hpp"
#include "hags/metrics.hpp"
#include "hags/plan.hpp"
#include "hags/scenario.hpp"
#include "hags/weather.hpp"

namespace fs = std::filesystem;
using namespace hags;

namespace {

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv("HAGS_SIM_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(fmt::format("HAGS_SIM_SEED is not an unsigned integer: '{}'", env));
  }
  return fallback;
}

ScenarioConfig scenario_with_seed(const std::string& path, const std::optional<std::uint64_t>& seed) {
  auto s = load_scenario(path);
  s.seed = resolve_seed(seed, s.seed);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HAGS/GS optical downlink simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, grid_path, results_path;
  std::optional<std::uint64_t> seed;
  std::uint64_t rep = 0;
  int jobs = 1;
  bool check = false, quiet = false;

  auto* gen_contacts = app.add_subcommand("gen-contacts", "write the geometric contact plan");
  gen_contacts->add_option("--scenario", scenario_path, "scenario file")->required();
  gen_contacts->add_option("--out", out_path, "output contact plan")->required();

  auto* gen_weather = app.add_subcommand("gen-weather", "write a sampled weather plan");
  gen_weather->add_option("--scenario", scenario_path, "scenario file")->required();
  gen_weather->add_option("--rep", rep, "replication index");
  gen_weather->add_option("--seed", seed, "master seed");
  gen_weather->add_option("--out", out_path, "output weather plan")->required();

  auto* run = app.add_subcommand("run", "simulate one replication");
  run->add_option("--scenario", scenario_path, "scenario file")->required();
  run->add_option("--rep", rep, "replication index");
  run->add_option("--seed", seed, "master seed");
  run->add_option("--out", out_path, "output directory")->required();
  run->add_flag("--check-conservation", check, "verify conservation after every event");

  auto* sweep = app.add_subcommand("sweep", "run a scheme x TCC x TCS x replication grid");
  sweep->add_option("--grid", grid_path, "grid file")->required();
  sweep->add_option("--seed", seed, "master seed");
  sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_path, "output directory")->required();
  sweep->add_flag("--check-conservation", check, "verify conservation after every event");
  sweep->add_flag("--quiet", quiet, "no progress output");

  auto* extract = app.add_subcommand("extract-equivalency", "equivalency points from a results CSV");
  extract->add_option("--results", results_path, "results CSV")->required();
  extract->add_option("--out", out_path, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*gen_contacts) {
      const auto s = load_scenario(scenario_path);
      write_text_file(out_path, plan::serialize_contact_plan(geometric_plan(s)));
    } else if (*gen_weather) {
      const auto s = scenario_with_seed(scenario_path, seed);
      write_text_file(out_path, weather::serialize_weather_plan(weather_plan(s, rep)));
    } else if (*run) {
      const auto s = scenario_with_seed(scenario_path, seed);
      engine::RunOptions opt;
      opt.check_conservation = check;
      const auto res = engine::run(s, geometric_plan(s), weather_plan(s, rep), rep, opt);
      const fs::path dir(out_path);
      write_text_file(dir / "result.json", engine::result_to_json(res));
      write_text_file(dir / "events.log", res.event_log);
      const auto m = metrics::summarize(res);
      std::cout << fmt::format("{} rep={} dr_pct={}", s.scheme_name(), rep, m.dr_pct);
      if (m.dd) std::cout << fmt::format(" dd_mean_s={} dd_max_s={}", m.dd->mean_s, m.dd->max_s);
      if (m.bo) std::cout << fmt::format(" bo_mean_pct={} bo_max_pct={}", m.bo->mean_pct, m.bo->max_pct);
      std::cout << '\n';
    } else if (*sweep) {
      const auto grid = harness::load_grid(grid_path);
      harness::SweepOptions opt;
      opt.jobs = jobs;
      opt.check_conservation = check;
      if (!quiet)
        opt.progress = [](std::size_t done, std::size_t total) {
          if (done % 100 == 0 || done == total) std::cerr << fmt::format("\r{}/{} cells", done, total) << std::flush;
        };
      const auto out = harness::run_sweep(grid, resolve_seed(seed, grid.base.seed), opt);
      if (!quiet) std::cerr << '\n';
      const fs::path dir(out_path);
      write_text_file(dir / "results.csv", harness::results_csv(out.rows));
      write_text_file(dir / "aggregates.csv", harness::aggregates_csv(out.aggregates));
      write_text_file(dir / "equivalency.csv",
                      harness::equivalency_csv(harness::extract_equivalency_points(out.rows)));
    } else if (*extract) {
      const auto rows = harness::parse_results_csv(read_text_file(results_path));
      write_text_file(out_path, harness::equivalency_csv(harness::extract_equivalency_points(rows)));
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
