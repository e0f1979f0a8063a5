#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace dqc::rng {

// SplitMix64 finalizer; the workhorse for counter-based draws and for
// deriving independent stream seeds from (master_seed, path...) tuples.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Hierarchical seed derivation. Jobs keyed by distinct paths never share a
// stream, and the result does not depend on scheduling order.
inline std::uint64_t derive(std::uint64_t seed,
                            std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(seed);
  for (std::uint64_t p : path) {
    s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
  }
  return s;
}

// Purpose tags keeping sub-streams of one job disjoint.
enum class Purpose : std::uint64_t {
  disorder = 1,
  trajectory = 2,
  observable = 3,
  direction = 4,
  ensemble = 5,
};

inline std::uint64_t derive(std::uint64_t seed, Purpose p,
                            std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = derive(seed, path);
  return mix64(s ^ static_cast<std::uint64_t>(p));
}

inline double to_unit(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

// xoshiro256** — small, fast, and identical on every platform, unlike the
// stdlib distributions.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
      s = mix64(s);
      word = s;
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1).
  double uniform01() { return to_unit(next()); }

  // Uniform on the open interval (0, 1); suitable for jump thresholds.
  double uniform_open01() {
    double x;
    do {
      x = uniform01();
    } while (x <= 0.0);
    return x;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Marsaglia polar method with one cached spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform(-1.0, 1.0);
      v = uniform(-1.0, 1.0);
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dqc::rng
