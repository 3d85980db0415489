#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace roughcalib {

// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Deterministic child seed for stream `index` of a master seed. Used so that
// path i of a dataset does not depend on how many paths were drawn before it.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept;

// Seeded variate stream. The uniform and normal transforms are written out
// here rather than taken from <random> distributions, whose output is
// implementation-defined, so that streams agree across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }
  // [0, 1) with 53 random bits.
  double uniform();
  // (0, 1), never returns 0.
  double uniform_open();
  // Standard normal (Marsaglia polar method).
  double normal();
  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  void fill_normal(std::span<double> out);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace roughcalib
