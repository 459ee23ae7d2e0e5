#include "hags/rng.hpp"

#include <cmath>

namespace hags::rng {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t substream_seed(std::uint64_t master_seed, std::string_view site_id,
                             std::uint64_t replication) {
  return splitmix64(splitmix64(master_seed) ^
                    splitmix64(fnv1a64(site_id) + 2 * replication + 1));
}

double Stream::exponential(double mean) { return -mean * std::log(uniform_open_closed()); }

}  // namespace hags::rng
