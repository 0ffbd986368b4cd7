#pragma once

#include <cstdint>
#include <random>

namespace geoflow {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Per-path random stream. The state is a pure function of (seed, stream),
/// so ensembles reproduce bit-for-bit regardless of worker count.
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    (void)splitmix64(s);
    s ^= 0xD1B54A32D192ED03ULL * (stream + 1);
    eng_.seed(splitmix64(s));
  }

  double normal() { return normal_(eng_); }
  double uniform() { return uniform_(eng_); }
  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace geoflow
