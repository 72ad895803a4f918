#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lnmix {

// Deterministic random source with a fully documented algorithm so that
// splits and noise reproduce bit-exactly for a given seed, independent of
// the standard library implementation:
//   engine    std::mt19937_64 (output sequence fixed by the C++ standard)
//   uniform   ((x >> 11) + 1) * 2^-53            -> (0, 1]
//   normal    Box-Muller on two uniforms, first sqrt(-2 ln u1) cos(2 pi u2),
//             then the sin twin (cached); consumes exactly two engine draws
//             per pair
//   integers  unbiased rejection sampling on the high bits
//   shuffle   Fisher-Yates, descending index, using uniform_below
// std::normal_distribution / std::shuffle are implementation-defined and are
// deliberately not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on (0, 1]; never returns 0, so log() is always finite.
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1p-53;
  }

  double normal();

  // Uniform integer in [0, n); n >= 1.
  std::uint64_t uniform_below(std::uint64_t n);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lnmix
