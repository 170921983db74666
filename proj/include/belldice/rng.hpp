#pragma once

#include <array>
#include <cstdint>

namespace belldice {

// splitmix64: tiny, fast, and identical on every platform. Used for seed
// derivation and for the quasirandom shift so results never depend on the
// standard library's distribution implementations.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform_double(uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

// Derives an independent stream seed; mixing the index twice keeps nearby
// indices decorrelated.
inline uint64_t derive_seed(uint64_t seed, uint64_t index) {
  uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  splitmix64(s);
  splitmix64(s);
  return s;
}

// Radical-inverse (van der Corput) value of `index` in the given base.
inline double radical_inverse(uint64_t index, uint32_t base) {
  double inv_base = 1.0 / base;
  double factor = inv_base;
  double value = 0.0;
  while (index > 0) {
    value += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv_base;
  }
  return value;
}

// Low-discrepancy point set for multistart seeding: Halton in the first six
// prime bases with a per-seed Cranley-Patterson rotation so different seeds
// explore shifted copies of the same well-spread lattice.
template <size_t Dim>
struct HaltonSequence {
  static_assert(Dim <= 6, "only six prime bases are provided");
  static constexpr std::array<uint32_t, 6> kBases{2, 3, 5, 7, 11, 13};

  std::array<double, Dim> shift{};

  explicit HaltonSequence(uint64_t seed) {
    uint64_t s = derive_seed(seed, 0x48414c54ULL);
    for (size_t d = 0; d < Dim; ++d) shift[d] = uniform_double(s);
  }

  std::array<double, Dim> point(uint64_t index) const {
    std::array<double, Dim> p{};
    for (size_t d = 0; d < Dim; ++d) {
      double v = radical_inverse(index + 1, kBases[d]) + shift[d];
      p[d] = v - static_cast<double>(static_cast<int64_t>(v));  // frac(v)
    }
    return p;
  }
};

}  // namespace belldice
