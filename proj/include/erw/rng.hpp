#pragma once

#include <cstdint>
#include <random>

namespace erw {

/// splitmix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the substream owned by `replicate` under `master_seed`:
///   splitmix64(master_seed ^ splitmix64(replicate)).
constexpr std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t replicate) noexcept {
  return splitmix64(master_seed ^ splitmix64(replicate));
}

/// mt19937_64 wrapper. The engine's output sequence is fixed by the C++
/// standard; uniforms are derived from raw words here rather than through
/// <random> distributions, whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  static Rng for_replicate(std::uint64_t master_seed, std::uint64_t replicate) {
    return Rng(substream_seed(master_seed, replicate));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), unbiased (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace erw
