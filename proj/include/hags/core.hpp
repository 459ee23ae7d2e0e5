#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hags {

/// Simulation clock tick. All event times are integer milliseconds.
using TimeMs = std::int64_t;
/// Data volume in bits.
using Bits = std::int64_t;
using RateBps = std::int64_t;

inline constexpr TimeMs kMsPerSecond = 1000;
inline constexpr TimeMs kMsPerHour = 3'600'000;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that fails validation (bad config, bad file, bad flag).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ConfigError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ConfigError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A broken internal invariant (causality, conservation, bookkeeping).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Rounds to the nearest millisecond.
TimeMs seconds_to_ms(double seconds);
inline double ms_to_seconds(TimeMs t) { return static_cast<double>(t) / kMsPerSecond; }

/// Time needed to push `bits` through a `rate` link, rounded up to whole ms.
TimeMs transmission_ms(Bits bits, RateBps rate);
/// Bits a `rate` link carries in `dt` ms, rounded down.
Bits bits_in(TimeMs dt, RateBps rate);

/// Decimal seconds text for a ms time: integral values print without a
/// fraction, others with up to three decimals.
std::string format_seconds(TimeMs t);
/// Parses decimal seconds into ms; throws ConfigError on junk.
TimeMs parse_seconds(std::string_view text);

}  // namespace hags
