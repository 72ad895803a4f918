#include "lnmix/rng.hpp"

#include <cmath>

namespace lnmix {

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  // Rejection sampling: draw until the value falls below the largest
  // multiple of n, then reduce. Unbiased for every n >= 1.
  if (n <= 1) return 0;
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

}  // namespace lnmix
