#ifndef SEMAUTO_RNG_HPP
#define SEMAUTO_RNG_HPP

#include <cstdint>
#include <vector>

#include "semauto/types.hpp"

namespace semauto {

// splitmix64. Self-contained so that shuffles and seed derivation are
// bit-identical across platforms and standard libraries; std::shuffle and
// std::mt19937 give no such guarantee for the sequences we persist.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream from (seed, stream). Per-user randomness is
// keyed this way so results cannot depend on iteration or schedule order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ull * (stream + 0x632be59bd9b4e019ull)));
  g();
  return g();
}

// Unbiased integer in [0, n) by rejection sampling.
inline std::uint64_t uniform_below(SplitMix64& g, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t r = g();
    if (r >= threshold) return r % n;
  }
}

// Uniform in [0, 1), 53-bit resolution.
inline Real uniform_real(SplitMix64& g) {
  return static_cast<Real>(g() >> 11) * (1.0 / 9007199254740992.0);
}

// Fisher-Yates with our own generator; deterministic everywhere.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, SplitMix64& g) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(g, i));
    if (j != i - 1) std::swap(v[i - 1], v[j]);
  }
}

}  // namespace semauto

#endif  // SEMAUTO_RNG_HPP
