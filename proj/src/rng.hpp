#ifndef SYNTAGRAPH_RNG_HPP
#define SYNTAGRAPH_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace syntagraph {

// Seeded generator with hand-rolled mappings. std::uniform_real_distribution
// is implementation-defined, so sampling goes through the raw 64-bit stream
// to keep outputs identical across toolchains.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // 53-bit uniform in [0, 1).
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform int in [0, n). Modulo bias is irrelevant at these ranges.
  int uniform_int(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

 private:
  std::mt19937_64 gen_;
};

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace syntagraph

#endif
