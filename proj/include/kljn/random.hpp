#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace kljn {

/// Who a derived noise stream belongs to. Each (bit index, party) pair gets
/// its own statistically independent stream.
enum class Party : std::uint64_t { Alice = 1, Bob = 2, EveInjection = 3 };

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/**
 * xoshiro256++ generator with a Marsaglia-polar Gaussian layer on top.
 *
 * Value-like: copy or move freely across threads, but never sample one
 * instance from two threads at once. Construction goes through from_key()
 * or derive_stream() so that the whole simulation is replayable from a
 * single master seed.
 */
class RandomStream {
 public:
  RandomStream() = default;

  static RandomStream from_key(std::uint64_t key) {
    RandomStream s;
    // SplitMix64 sequence expansion; avoids the all-zero xoshiro state.
    std::uint64_t x = key;
    for (auto& w : s.state_) {
      x += 0x9E3779B97F4A7C15ULL;
      w = mix64(x);
    }
    return s;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal deviate (polar method, caches the spare).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  /// Fair coin.
  bool coin() { return (next_u64() >> 63) != 0; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{1, 2, 3, 4};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Counter-based keyed stream derivation: one master seed fans out into an
/// independent stream per (bit index, party). Same inputs, same stream.
inline RandomStream derive_stream(std::uint64_t master_seed,
                                  std::uint64_t bit_index, Party party) {
  std::uint64_t key = mix64(master_seed);
  key = mix64(key ^ (bit_index + 0x9E3779B97F4A7C15ULL));
  key = mix64(key ^ (static_cast<std::uint64_t>(party) * 0xD1B54A32D192ED03ULL));
  return RandomStream::from_key(key);
}

}  // namespace kljn
