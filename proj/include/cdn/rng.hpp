#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cdn {

// Deterministic random stream. mt19937_64 output is fixed by the standard;
// the distribution transforms are written out here because the standard
// library's distribution objects are not portable across implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {  // Box-Muller
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t integer(std::uint64_t n) {  // [0, n)
    return gen_() % n;
  }

private:
  std::mt19937_64 gen_;
};

// Stable per-stream seed derivation (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace cdn
