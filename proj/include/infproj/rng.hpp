#ifndef INFPROJ_RNG_HPP
#define INFPROJ_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace infproj {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded splittable PRNG. split(tag) is a pure function of (seed, tag),
// so derived streams are independent of how much the parent has drawn.
class rng {
 public:
  explicit rng(std::uint64_t seed)
      : seed_(seed), eng_(splitmix64(splitmix64(seed))) {}

  rng split(std::uint64_t tag) const {
    return rng(splitmix64(seed_ ^ (0x9e3779b97f4a7c15ULL * (tag + 1))));
  }

  rng split(std::uint64_t tag_a, std::uint64_t tag_b) const {
    return split(tag_a).split(tag_b);
  }

  std::uint64_t next() { return eng_(); }

  // Uniform integer in [0, n) via 128-bit multiply; stable across platforms.
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 1e-300) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64 &engine() { return eng_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace infproj

#endif
