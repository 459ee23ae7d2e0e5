#include "hags/core.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

namespace hags {

TimeMs seconds_to_ms(double seconds) { return static_cast<TimeMs>(std::llround(seconds * 1000.0)); }

namespace {
__extension__ typedef __int128 Wide;
}  // namespace

TimeMs transmission_ms(Bits bits, RateBps rate) {
  if (rate <= 0) throw InvariantError("non-positive link rate");
  if (bits <= 0) return 0;
  const auto num = static_cast<Wide>(bits) * kMsPerSecond;
  return static_cast<TimeMs>((num + rate - 1) / rate);
}

Bits bits_in(TimeMs dt, RateBps rate) {
  if (dt <= 0) return 0;
  return static_cast<Bits>(static_cast<Wide>(dt) * rate / kMsPerSecond);
}

std::string format_seconds(TimeMs t) {
  const bool neg = t < 0;
  const TimeMs a = neg ? -t : t;
  std::string out = fmt::format("{}{}", neg ? "-" : "", a / kMsPerSecond);
  if (TimeMs frac = a % kMsPerSecond; frac != 0) {
    std::string digits = fmt::format("{:03d}", frac);
    while (digits.back() == '0') digits.pop_back();
    out += "." + digits;
  }
  return out;
}

TimeMs parse_seconds(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
    throw ConfigError(fmt::format("invalid time '{}'", text));
  return seconds_to_ms(value);
}

}  // namespace hags
