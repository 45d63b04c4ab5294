#pragma once

// Seeded, platform-stable random streams.
//
// Every draw sequence is a pure function of (master seed, stream index): the
// engine is std::mt19937_64 (output fully specified by the standard), seeded
// with a splitmix64 mix of seed and stream, and the uniform and normal
// transforms below use only IEEE arithmetic, sqrt and log. No std::*_distribution
// is used because their algorithms are implementation-defined.

#include <cmath>
#include <cstdint>
#include <random>

namespace snm {

struct RngHandle {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

class RngStream {
 public:
  explicit RngStream(RngHandle handle) : handle_(handle) {
    // std::seed_seq costs ~20us per stream; risk estimation seeds one per trial.
    engine_.seed(mix(mix(handle.seed) ^ handle.stream));
  }

  RngHandle handle() const { return handle_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), unbiased.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % n;
    }
  }

  // Standard normal by the Marsaglia polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  RngHandle handle_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace snm
