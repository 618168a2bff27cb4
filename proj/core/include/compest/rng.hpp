#pragma once

// Seeded generator with a fixed, documented algorithm so that every derived
// quantity is bit-reproducible across platforms:
//   engine   std::mt19937_64, seeded with splitmix64(seed ^ splitmix64(stream))
//   uniform  (x >> 11) * 2^-53, a double in [0, 1)
//   below(n) rejection sampling on the top of the 64-bit range (unbiased)

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace compest {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() { return engine_(); }
  double uniform();
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  // Fisher-Yates, swapping from the back.
  template <typename T>
  void shuffle(std::span<T> v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Seed streams used across the library.
namespace streams {
inline constexpr std::uint64_t kInitialStatus = 1;
inline constexpr std::uint64_t kTransitions = 2;
inline constexpr std::uint64_t kCovariates = 3;
inline constexpr std::uint64_t kOptimizerRestarts = 4;
}  // namespace streams

}  // namespace compest
