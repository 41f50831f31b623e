#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace tasched::rng {

// Counter-based stream derivation shared by every randomized component.
//
//   mix(x)               = SplitMix64 finalizer applied to (x + 0x9E3779B97F4A7C15)
//   label_hash(label)    = 64-bit FNV-1a over the label bytes
//   derive(s, label, i)  = mix(mix(s ^ label_hash(label)) + i)
//
// A Stream seeded with key k yields mix(k + 1), mix(k + 2), ... so every
// (seed, label, index) triple is an independent, platform-stable sequence.

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix(std::uint64_t x) {
  std::uint64_t z = x + kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t label_hash(std::string_view label) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

constexpr std::uint64_t derive(std::uint64_t seed, std::string_view label, std::uint64_t index) {
  return mix(mix(seed ^ label_hash(label)) + index);
}

class Stream {
 public:
  explicit constexpr Stream(std::uint64_t key) : key_(key) {}
  Stream(std::uint64_t seed, std::string_view label, std::uint64_t index)
      : key_(derive(seed, label, index)) {}

  constexpr std::uint64_t next() { return mix(key_ + ++counter_); }

  // Uniform integer in [lo, hi], unbiased (Lemire's multiply-shift with rejection).
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw std::invalid_argument("rng::Stream::uniform: empty range");
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<std::int64_t>(next());  // full 64-bit span
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * range;
    auto low = static_cast<std::uint64_t>(m);
    if (low < range) {
      const std::uint64_t threshold = (0 - range) % range;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * range;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return lo + static_cast<std::int64_t>(m >> 64);
  }

  // True with probability num / den.
  bool bernoulli(std::uint64_t num, std::uint64_t den) {
    if (den == 0 || num > den) throw std::invalid_argument("rng::Stream::bernoulli: bad ratio");
    return static_cast<std::uint64_t>(uniform(0, static_cast<std::int64_t>(den) - 1)) < num;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace tasched::rng
