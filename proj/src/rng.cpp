#include "nlgqe/rng.hpp"

namespace nlgqe {

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
  return fnv1a(s.data(), s.size(), seed);
}

std::uint64_t derive_seed(std::uint64_t parent, const std::string& tag,
                          std::uint64_t index) {
  std::uint64_t h = fnv1a(tag);
  h = fnv1a(&parent, sizeof(parent), h);
  h = fnv1a(&index, sizeof(index), h);
  // Never hand out 0; splitmix copes, but a nonzero state is easier to spot
  // in logs.
  return h == 0 ? 0x9e3779b97f4a7c15ULL : h;
}

}  // namespace nlgqe
