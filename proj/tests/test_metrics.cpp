#include <doctest.h>

#include <cmath>
#include <random>

#include "hags/metrics.hpp"
#include "helpers.hpp"

using namespace hags;
using namespace hags::metrics;
using engine::BundleRecord;
using engine::SimResult;

namespace {

SimResult with_bundles(int generated, int delivered) {
  SimResult r;
  r.duration_ms = 1000;
  for (int i = 0; i < generated; ++i) {
    BundleRecord b;
    b.bundle_id = "b" + std::to_string(i);
    if (i < delivered) b.delivered_at_ms = 10;
    r.bundles.push_back(b);
  }
  return r;
}

}  // namespace

TEST_CASE("delivery ratio") {
  CHECK(delivery_ratio(with_bundles(50, 50)) == 100.0);
  CHECK(delivery_ratio(with_bundles(50, 30)) == 60.0);
  CHECK(delivery_ratio(with_bundles(50, 0)) == 0.0);
  CHECK_THROWS_WITH_AS(delivery_ratio(with_bundles(0, 0)), "empty traffic", ConfigError);
}

TEST_CASE("delivery delay") {
  SimResult r;
  BundleRecord b;
  b.t_gen_ms = 0;
  b.delivered_at_ms = 3'600'000;
  r.bundles = {b};
  auto dd = delivery_delay_stats(r);
  REQUIRE(dd);
  CHECK(dd->mean_s == 3600.0);
  CHECK(dd->max_s == 3600.0);

  r.bundles[0].delivered_at_ms = 100'000;
  r.bundles.push_back(r.bundles[0]);
  r.bundles[1].delivered_at_ms = 300'000;
  dd = delivery_delay_stats(r);
  CHECK(dd->mean_s == 200.0);
  CHECK(dd->max_s == 300.0);

  r.bundles.push_back(BundleRecord{});  // undelivered: ignored
  CHECK(delivery_delay_stats(r)->mean_s == 200.0);
  CHECK_FALSE(delivery_delay_stats(with_bundles(3, 0)));

  r.bundles[0].t_gen_ms = 200'000;
  CHECK_THROWS_AS(delivery_delay_stats(r), InvariantError);
}

TEST_CASE("buffer occupation") {
  const Bits file = testing::kFile;
  SimResult r;
  r.duration_ms = testing::kWeek;
  r.generated_bits = 50 * file;  // 5 TB
  r.bo_series["HAGS1"].set(0, file);
  auto bo = buffer_occupation(r, "HAGS1");
  CHECK(bo.max_pct == doctest::Approx(2.0));
  CHECK(bo.mean_pct == doctest::Approx(2.0));

  r.bo_series["EMPTY"];
  bo = buffer_occupation(r, "EMPTY");
  CHECK(bo.max_pct == 0.0);
  CHECK(bo.mean_pct == 0.0);

  r.bo_series["HALF"].set(r.duration_ms / 2, file);
  bo = buffer_occupation(r, "HALF");
  CHECK(bo.mean_pct == doctest::Approx(bo.max_pct / 2));

  // Hand-integrated staircase: 10% for 1/4, 30% for 1/4, 0 after.
  SimResult s;
  s.duration_ms = 4000;
  s.generated_bits = 1000;
  s.bo_series["A"].set(0, 100);
  s.bo_series["A"].set(1000, 300);
  s.bo_series["A"].set(2000, 0);
  s.bo_series["B"].set(1000, 200);
  s.bo_series["B"].set(3000, 0);
  bo = buffer_occupation(s, "A");
  CHECK(bo.mean_pct == doctest::Approx(10.0));
  CHECK(bo.max_pct == doctest::Approx(30.0));
  const std::vector<std::string> both{"A", "B"};
  bo = buffer_occupation(s, both);
  CHECK(bo.max_pct == doctest::Approx(50.0));
  CHECK(bo.mean_pct == doctest::Approx(20.0));  // (100 + 500 + 200 + 0) / 4 / 10
  CHECK_THROWS_AS(buffer_occupation(s, "Z"), ConfigError);
}

TEST_CASE("ci95") {
  const std::vector<double> same(100, 7.0);
  auto ci = ci95(same);
  CHECK(ci.mean == 7.0);
  CHECK(ci.half_width_95 == 0.0);
  CHECK(ci.n == 100);

  const std::vector<double> two{0.0, 2.0};
  ci = ci95(two);
  CHECK(ci.mean == 1.0);
  CHECK(ci.half_width_95 == doctest::Approx(1.96));

  // n = 100 with sample sd exactly 10: +/-10 alternating about 50, rescaled.
  std::vector<double> xs;
  for (int i = 0; i < 100; ++i) xs.push_back(50.0 + (i % 2 ? 1.0 : -1.0));
  const double scale = 10.0 / std::sqrt(100.0 / 99.0);
  for (auto& x : xs) x = 50.0 + (x - 50.0) * scale;
  ci = ci95(xs);
  CHECK(ci.mean == doctest::Approx(50.0));
  CHECK(ci.half_width_95 == doctest::Approx(1.96));

  const std::vector<double> one{3.0};
  CHECK_THROWS_WITH_AS(ci95(one), "insufficient samples", ConfigError);
}

TEST_CASE("ci95 half-width shrinks as 1/sqrt(n)") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> d(10.0, 3.0);
  auto mean_half_width = [&](int n) {
    double sum = 0;
    for (int k = 0; k < 400; ++k) {
      std::vector<double> xs(static_cast<std::size_t>(n));
      for (auto& x : xs) x = d(gen);
      sum += ci95(xs).half_width_95;
    }
    return sum / 400;
  };
  const double h100 = mean_half_width(100), h400 = mean_half_width(400);
  CHECK(h100 / h400 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("summary record invariants") {
  const auto s = testing::tiny_scenario(1, 1, 3);
  const auto plan = testing::plan_of(
      "contact 100 500 LEO1 HAGS1 8000000000\n"
      "contact 0 604800 HAGS1 GS1 8000000000 weather_site=GS1\n");
  const auto r = engine::run(s, plan, testing::weather_of("blocked GS1 0 1000\n"), 0);
  const auto m = summarize(r);
  CHECK(m.dr_pct == 100.0);
  CHECK(m.n_delivered == 3);
  REQUIRE(m.dd);
  CHECK(m.dd->max_s == 1300.0);
  CHECK(m.dd->mean_s == 1200.0);
  REQUIRE(m.bo);
  CHECK(m.bo->max_pct == doctest::Approx(100.0));
  CHECK(m.bo->mean_pct <= m.bo->max_pct);
  CHECK(buffer_occupation(r, "GS1").max_pct == 0.0);
}

TEST_CASE("removing a contact never raises the delivery ratio") {
  auto base = load_scenario(std::string(HAGS_DATA_DIR) + "/scenarios/default.cfg");
  std::mt19937_64 gen(12);
  for (auto [n_gs, n_hags] : {std::pair{1, 0}, std::pair{1, 1}, std::pair{2, 1}}) {
    auto s = base;
    s.gs_sites = {"GS1", "GS2"};
    s.gs_sites.resize(static_cast<std::size_t>(n_gs));
    s.hags_over.assign(s.gs_sites.begin(), s.gs_sites.begin() + n_hags);
    s.weather = {0.5, 5.0};
    const auto plan = geometric_plan(s);
    for (std::uint64_t rep = 0; rep < 4; ++rep) {
      const auto w = weather_plan(s, rep);
      const double dr = delivery_ratio(engine::run(s, plan, w, rep));
      for (int k = 0; k < 5; ++k) {
        auto smaller = plan;
        smaller.contacts.erase(smaller.contacts.begin() +
                               static_cast<long>(gen() % smaller.contacts.size()));
        CHECK(delivery_ratio(engine::run(s, smaller, w, rep)) <= dr);
      }
    }
  }
}
