#ifndef TRITHUMB_RNG_H_
#define TRITHUMB_RNG_H_

// Seedable random source with results that do not depend on the standard
// library implementation. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the distributions on top of it are
// defined here because the std:: ones are not portable.

#include <cstdint>
#include <random>

namespace trithumb {

// One step of SplitMix64. Used to derive independent seeds.
inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for the task-th job of a run seeded with `seed`.
inline uint64_t DeriveSeed(uint64_t seed, uint64_t task) {
  return SplitMix64(SplitMix64(seed) ^ SplitMix64(task + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform in [0, n), n >= 1, by rejection sampling.
  uint64_t Below(uint64_t n) {
    const uint64_t limit = -n % n;  // 2^64 mod n
    uint64_t x;
    do {
      x = engine_();
    } while (x < limit);
    return x % n;
  }
  int Below(int n) { return int(Below(uint64_t(n))); }

  // Uniform in [0, 1) with 53 random bits.
  double Unit() { return double(engine_() >> 11) * 0x1.0p-53; }

  bool Chance(double p) { return p >= 1 || (p > 0 && Unit() < p); }

  // +1 or -1.
  int Sign() { return (engine_() >> 63) ? 1 : -1; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace trithumb

#endif  // TRITHUMB_RNG_H_
