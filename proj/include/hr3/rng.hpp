#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hr3 {

/// Deterministic splitmix64 generator. All randomness in the library flows
/// through this type so results are reproducible across platforms; substreams
/// are derived from (seed, name) so concurrent builders stay independent.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ULL) {}

  static Rng substream(uint64_t seed, const std::string& name) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : name) { h ^= c; h *= 1099511628211ULL; }
    return Rng(seed ^ h);
  }

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, n).
  uint64_t below(uint64_t n) {
    if (n == 0) return 0;
    uint64_t lim = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do { v = next(); } while (v >= lim);
    return v % n;
  }

  /// True with probability num/den.
  bool chance(uint64_t num, uint64_t den) { return below(den) < num; }

  double unit() { return double(next() >> 11) * (1.0 / 9007199254740992.0); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
};

}  // namespace hr3
