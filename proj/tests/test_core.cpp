#include <doctest.h>

#include "hags/core.hpp"
#include "hags/rng.hpp"

using namespace hags;

TEST_CASE("transmission time rounds up to the next millisecond") {
  CHECK(transmission_ms(800'000'000'000, 8'000'000'000) == 100'000);
  CHECK(transmission_ms(1, 8'000'000'000) == 1);
  CHECK(transmission_ms(8'000'001, 8'000'000'000) == 2);
  CHECK(transmission_ms(0, 1) == 0);
  CHECK_THROWS_AS(transmission_ms(1, 0), InvariantError);
}

TEST_CASE("bits sent in an interval round down") {
  CHECK(bits_in(1000, 8'000'000'000) == 8'000'000'000);
  CHECK(bits_in(1, 3) == 0);
  CHECK(bits_in(334, 3) == 1);
  CHECK(bits_in(-5, 100) == 0);
  // No overflow for a week at 8 Gbps.
  CHECK(bits_in(604'800'000, 8'000'000'000) == 4'838'400'000'000'000);
}

TEST_CASE("seconds text") {
  CHECK(seconds_to_ms(1.0005) == 1001);
  CHECK(format_seconds(604'800'000) == "604800");
  CHECK(format_seconds(1'500) == "1.5");
  CHECK(format_seconds(1'234) == "1.234");
  CHECK(format_seconds(-250) == "-0.25");
  CHECK(parse_seconds("0.001") == 1);
  CHECK(parse_seconds("604800") == 604'800'000);
  CHECK_THROWS_AS(parse_seconds("abc"), ConfigError);
  for (TimeMs t : {0LL, 1LL, 999LL, 1000LL, 123'456'789LL}) CHECK(parse_seconds(format_seconds(t)) == t);
}

TEST_CASE("mixing functions are fixed") {
  // Reference values of the published SplitMix64 and FNV-1a constants.
  CHECK(rng::splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(rng::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(rng::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(rng::substream_seed(1, "GS1", 0) != rng::substream_seed(1, "GS1", 1));
  CHECK(rng::substream_seed(1, "GS1", 0) != rng::substream_seed(1, "GS2", 0));
  CHECK(rng::substream_seed(1, "GS1", 0) != rng::substream_seed(2, "GS1", 0));
}

TEST_CASE("uniform draws stay in range") {
  rng::Stream s(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform_open_closed();
    CHECK((u > 0.0 && u <= 1.0));
    const double v = s.uniform();
    CHECK((v >= 0.0 && v < 1.0));
  }
  rng::Stream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.exponential(3.0) == b.exponential(3.0));
}
