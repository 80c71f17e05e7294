#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace actgeo {

// Seeded generator whose output is identical on every platform.
//
// std::mt19937_64 is fully specified by the standard, but the std
// distributions are not, so uniform/normal/index draws are derived here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform();

  // Standard normal (Box-Muller, second variate cached).
  double normal();

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t index(std::uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent stream seed from a base seed and a stream index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace actgeo
