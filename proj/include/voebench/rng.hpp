#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace voebench {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Folds a list of tags into a single stream key.
inline constexpr std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t key = mix64(seed);
  for (auto t : tags) key = mix64(key ^ mix64(t + 0x632BE59BD9B4E019ULL));
  return key;
}

inline constexpr std::uint64_t tag(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based generator: the n-th draw is a pure function of (key, n), so
/// streams for different movies never interact and generation order is irrelevant.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  constexpr std::uint64_t next() { return mix64(key_ ^ mix64(++counter_)); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next() % span);
  }

  bool coin() { return (next() >> 63) != 0; }

  CounterRng fork(std::uint64_t t) const { return CounterRng(derive_key(key_, {t})); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace voebench
