#ifndef PRIVSIM_RANDOM_HPP
#define PRIVSIM_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace privsim {

// Seeded random stream with explicit inverse-CDF / Box-Muller transforms.
// std::mt19937_64 output is fully specified by the standard, and the
// transforms below avoid the implementation-defined std:: distributions,
// so identical seeds give bit-identical draws on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Exponential with the given mean (inverse CDF).
  double exponential(double mean) {
    return -mean * std::log1p(-uniform());
  }

  // Zero-mean normal with standard deviation sigma (Box-Muller).
  double normal(double sigma) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return sigma * r * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 step; used to derive independent per-run seeds from a base
// seed and small indices without consuming a shared stream.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return mix_seed(mix_seed(base ^ (a * 0x9e3779b97f4a7c15ULL)) ^
                  (b * 0xc2b2ae3d27d4eb4fULL));
}

}  // namespace privsim

#endif  // PRIVSIM_RANDOM_HPP
