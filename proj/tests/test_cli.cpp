#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "hags/harness.hpp"
#include "hags/plan.hpp"
#include "hags/scenario.hpp"
#include "hags/weather.hpp"

namespace fs = std::filesystem;
using namespace hags;

namespace {

const std::string kBin = HAGS_SIM_BIN;
const std::string kData = HAGS_DATA_DIR;

struct Outcome {
  int code = -1;
  std::string out, err;
};

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hags_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome sh(const std::string& args, const fs::path& dir, const std::string& env = "") {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = env + " '" + kBin + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = slurp(out);
  o.err = slurp(err);
  return o;
}

/// One-day copy of the default scenario so the CLI runs stay quick.
fs::path short_scenario(const fs::path& dir, const std::string& extra = "") {
  auto text = read_text_file(kData + "/scenarios/default.cfg");
  text += "duration_s = 86400\ntraffic.count = 5\nsites_file = " + kData + "/ksat_sites.txt\n" + extra;
  const auto p = dir / "scenario.cfg";
  write_text_file(p, text);
  return p;
}

}  // namespace

TEST_CASE("shipped default scenario") {
  const auto s = load_scenario(kData + "/scenarios/default.cfg");
  CHECK(s.traffic.count == 50);
  CHECK(s.traffic.size_bits == 800'000'000'000);
  CHECK(s.rate_bps == 8'000'000'000);
  CHECK(s.duration_ms == 604'800'000);
  CHECK(s.gs_sites == std::vector<std::string>{"GS1"});
  CHECK(s.sites.size() == 10);
  CHECK(s.mode == WeatherMode::oracle);
}

TEST_CASE("argument errors exit with status 1") {
  const auto dir = scratch("args");
  auto o = sh("run --scenario x --out y --no-such-flag", dir);
  CHECK(o.code == 1);
  CHECK_FALSE(o.err.empty());
  o = sh("frobnicate", dir);
  CHECK(o.code == 1);
  o = sh("run --out y", dir);
  CHECK(o.code == 1);
}

TEST_CASE("bad configuration exits with status 1") {
  const auto dir = scratch("config");
  write_text_file(dir / "empty.cfg", "# no axes\n");
  auto o = sh("sweep --grid '" + (dir / "empty.cfg").string() + "' --out '" + (dir / "o").string() + "'", dir);
  CHECK(o.code == 1);
  CHECK(o.err.find("empty grid") != std::string::npos);
  o = sh("run --scenario '" + (dir / "missing.cfg").string() + "' --out '" + (dir / "o").string() + "'", dir);
  CHECK(o.code == 1);
}

TEST_CASE("run writes identical bytes for identical input") {
  const auto dir = scratch("run");
  const auto scen = short_scenario(dir).string();
  const auto a = sh("run --scenario '" + scen + "' --rep 2 --seed 9 --out '" + (dir / "a").string() + "'", dir);
  const auto b = sh("run --scenario '" + scen + "' --rep 2 --seed 9 --out '" + (dir / "b").string() + "' --check-conservation", dir);
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("1LEO-1GS rep=2 dr_pct=", 0) == 0);
  const auto ja = slurp(dir / "a" / "result.json");
  CHECK_FALSE(ja.empty());
  CHECK(ja == slurp(dir / "b" / "result.json"));
  CHECK(slurp(dir / "a" / "events.log") == slurp(dir / "b" / "events.log"));
  CHECK(ja.find("\"bo_series\"") != std::string::npos);
}

TEST_CASE("seed falls back to the environment") {
  const auto dir = scratch("seed");
  const auto scen = short_scenario(dir).string();
  const auto flag = sh("gen-weather --scenario '" + scen + "' --seed 77 --out '" + (dir / "f.txt").string() + "'", dir);
  const auto env = sh("gen-weather --scenario '" + scen + "' --out '" + (dir / "e.txt").string() + "'", dir, "HAGS_SIM_SEED=77");
  const auto dflt = sh("gen-weather --scenario '" + scen + "' --out '" + (dir / "d.txt").string() + "'", dir);
  REQUIRE(flag.code == 0);
  REQUIRE(env.code == 0);
  REQUIRE(dflt.code == 0);
  CHECK(slurp(dir / "f.txt") == slurp(dir / "e.txt"));
  CHECK(slurp(dir / "f.txt") != slurp(dir / "d.txt"));
}

TEST_CASE("generated plans parse back") {
  const auto dir = scratch("gen");
  const auto scen = short_scenario(dir, "hags_over = GS1\n").string();
  REQUIRE(sh("gen-contacts --scenario '" + scen + "' --out '" + (dir / "c.txt").string() + "'", dir).code == 0);
  REQUIRE(sh("gen-weather --scenario '" + scen + "' --rep 1 --out '" + (dir / "w.txt").string() + "'", dir).code == 0);
  const auto s = load_scenario(scen);
  const auto contacts = plan::parse_contact_plan(slurp(dir / "c.txt"), s.duration_ms);
  CHECK_FALSE(contacts.contacts.empty());
  CHECK(plan::serialize_contact_plan(contacts) == plan::serialize_contact_plan(geometric_plan(s)));
  const auto w = weather::parse_weather_plan(slurp(dir / "w.txt"), s.duration_ms);
  CHECK(weather::serialize_weather_plan(w) == weather::serialize_weather_plan(weather_plan(s, 1)));
}

TEST_CASE("sweep and equivalency extraction") {
  const auto dir = scratch("sweep");
  const auto scen = short_scenario(dir);
  write_text_file(dir / "grid.cfg",
                  "scenario = scenario.cfg\ngs_counts = 1, 2\nhags_counts = 1\n"
                  "tcc_hours = 0.5, 5\ntcs_hours = 5\nreplications = 2\n");
  const auto grid = (dir / "grid.cfg").string();
  const auto a = sh("sweep --grid '" + grid + "' --seed 4 --jobs 2 --quiet --out '" + (dir / "a").string() + "'", dir);
  const auto b = sh("sweep --grid '" + grid + "' --seed 4 --jobs 1 --quiet --out '" + (dir / "b").string() + "'", dir);
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  for (const char* f : {"results.csv", "aggregates.csv", "equivalency.csv"})
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  const auto rows = harness::parse_results_csv(slurp(dir / "a" / "results.csv"));
  CHECK(rows.size() == 3 * 2 * 2);
  const auto x = sh("extract-equivalency --results '" + (dir / "a" / "results.csv").string() + "' --out '" +
                        (dir / "eq.csv").string() + "'",
                    dir);
  REQUIRE(x.code == 0);
  CHECK(slurp(dir / "eq.csv") == slurp(dir / "a" / "equivalency.csv"));
  CHECK(harness::parse_equivalency_csv(slurp(dir / "eq.csv")) == harness::extract_equivalency_points(rows));
}
