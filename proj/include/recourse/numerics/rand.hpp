#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace recourse {

// Seeded generator with a platform-independent output sequence.
//
// Raw bits come from std::mt19937_64, whose sequence is fixed by the C++
// standard. Every derived distribution (uniform doubles, bounded integers,
// normals, shuffles) is implemented here rather than through <random>
// distributions, whose algorithms are implementation-defined.
class Rand {
 public:
  explicit Rand(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); rejection sampling, no modulo bias.
  std::size_t below(std::size_t n);

  // Standard normal via the Marsaglia polar method.
  double normal();

  double normal(double mean, double std) { return mean + std * normal(); }

  // Fisher-Yates, high index to low.
  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  // Derives an independent generator for a named sub-stream.
  Rand fork(std::uint64_t stream);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace recourse
