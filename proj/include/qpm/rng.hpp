#pragma once

#include <cmath>
#include <cstdint>

namespace qpm {

// Deterministic, platform-independent random stream: xoshiro256++ seeded via
// splitmix64, with a hand-rolled Box-Muller normal (no std::distribution, so
// the byte stream is identical on every standard library).
//
// Streams are value types. Monte Carlo code derives one stream per sample
// index from (master seed, index); results then cannot depend on how samples
// are scheduled across threads.
class RngStream {
 public:
  RngStream() : RngStream(0) {}

  explicit RngStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  // Stream for sample `index` under `master_seed`. Distinct (seed, index)
  // pairs give statistically independent streams.
  static RngStream derive(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t sm = master_seed;
    std::uint64_t a = splitmix64(sm);
    std::uint64_t b = splitmix64(sm);
    std::uint64_t mix = index + 0x9E3779B97F4A7C15ull;
    mix = splitmix64(mix);
    RngStream r;
    std::uint64_t seed2 = a ^ (mix + (b << 1));
    for (auto& w : r.s_) w = splitmix64(seed2);
    r.have_cached_ = false;
    return r;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on (0,1]; never returns 0 (safe under log()).
  double uniform() {
    const std::uint64_t u = next_u64() >> 11;  // 53 bits
    return (static_cast<double>(u) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; second deviate cached in the stream state.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4] = {};
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace qpm
