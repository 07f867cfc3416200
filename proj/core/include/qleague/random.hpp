#pragma once

// Keyed random streams.
//
// Every stream is identified by a tuple (master seed, purpose tag, a, b) that
// is hashed into a 64-bit key; the key seeds a xoshiro256** generator through
// SplitMix64. Streams are therefore independent of the order in which they
// are created, which is what makes replica-parallel simulation reproducible.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

namespace qleague {

constexpr std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  std::uint64_t s = x;
  return splitmix64_next(s);
}

/// FNV-1a, used to turn purpose tags into integers at compile time.
constexpr std::uint64_t tag_hash(std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_key(std::uint64_t master, std::string_view tag,
                                   std::uint64_t a = 0,
                                   std::uint64_t b = 0) noexcept {
  std::uint64_t k = mix64(master ^ 0x6a09e667f3bcc909ULL);
  k = mix64(k ^ tag_hash(tag));
  k = mix64(k ^ (a + 0x3c6ef372fe94f82bULL));
  k = mix64(k ^ (b + 0xa54ff53a5f1d36f1ULL));
  return k;
}

/// xoshiro256** generator; satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Stream(std::uint64_t key) noexcept {
    std::uint64_t sm = key;
    for (auto& w : s_) w = splitmix64_next(sm);
  }

  static constexpr Stream derive(std::uint64_t master, std::string_view tag,
                                 std::uint64_t a = 0,
                                 std::uint64_t b = 0) noexcept {
    return Stream(derive_key(master, tag, a, b));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double on [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer on [0, n), n > 0 (Lemire's multiply-shift with rejection).
  constexpr std::uint64_t below(std::uint64_t n) noexcept {
    std::uint64_t x = (*this)();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = (*this)();
        m = static_cast<__uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Standard normal draw (Marsaglia polar method, no cached spare so the
  /// stream position depends only on the number of calls).
  double normal() noexcept {
    for (;;) {
      const double u = 2.0 * uniform() - 1.0;
      const double v = 2.0 * uniform() - 1.0;
      const double r2 = u * u + v * v;
      if (r2 > 0.0 && r2 < 1.0) return u * std::sqrt(-2.0 * std::log(r2) / r2);
    }
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4]{};
};

}  // namespace qleague
