#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nlgqe {

// Deterministic RNG with hand-rolled draw helpers so that seeded runs
// reproduce bit-exactly across standard library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // A couple of warm-up mixes so small seeds do not start near-zero.
    next_u64();
    next_u64();
  }

  // splitmix64 step.
  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
  }

  bool bernoulli(double p) { return next_double() < p; }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// Derives a child seed from a parent seed and a tag, so independent
// subsystems (init, shuffling, dropout, per-source corruption) never share
// a stream.
std::uint64_t derive_seed(std::uint64_t parent, const std::string& tag,
                          std::uint64_t index = 0);

// FNV-1a over raw bytes; used for input digests and vocabulary hashes.
std::uint64_t fnv1a(const void* data, std::size_t len,
                    std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a(const std::string& s,
                    std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace nlgqe
