#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hags::rng {

/// SplitMix64 finalizer. Stable across platforms; used for all seed mixing.
std::uint64_t splitmix64(std::uint64_t x);

/// 64-bit FNV-1a over the bytes of `text`.
std::uint64_t fnv1a64(std::string_view text);

/// Seed of the substream owned by (site, replication) under `master_seed`.
///
///   seed = splitmix64(splitmix64(master_seed) ^ splitmix64(fnv1a64(site_id) + 2*rep + 1))
///
/// Adding or removing sites never changes another site's seed.
std::uint64_t substream_seed(std::uint64_t master_seed, std::string_view site_id,
                             std::uint64_t replication);

/// Deterministic uniform stream. The mt19937_64 output sequence is fixed by
/// the C++ standard, and the double conversion below is done by hand, so a
/// given seed yields identical draws on every conforming platform.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1], 53-bit resolution.
  double uniform_open_closed() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exponential draw by inverse CDF.
  double exponential(double mean);

 private:
  std::mt19937_64 engine_;
};

}  // namespace hags::rng
