#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hestonfwd {

// Counter-based stream keyed by (master seed, path index, process tag).
// Each draw is a pure function of (key, counter), so streams can be created
// independently on any thread and always reproduce the same sequence.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

enum class StreamTag : std::uint64_t { W = 1, B = 2, Randomizer = 3 };

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t path_index, StreamTag tag)
      : key_(splitmix64(splitmix64(splitmix64(master_seed) ^
                                   (path_index * 0xA24BAED4963EE407ULL)) ^
                        (static_cast<std::uint64_t>(tag) * 0x9FB21C651E98DF25ULL))) {}

  std::uint64_t next_u64() { return splitmix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

  // Uniform in (0, 1].
  double uniform() {
    return (double(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; two uniforms per draw, no pair cache.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace hestonfwd
