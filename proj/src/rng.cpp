#include "sandlab/rng.hpp"

#include <stdexcept>

namespace sandlab::rng {

std::int64_t Counter::next_poisson(double lambda) {
  if (lambda < 0 || !std::isfinite(lambda))
    throw std::invalid_argument("poisson: lambda must be finite and >= 0");
  if (lambda == 0) return 0;
  // Multiplication method; splits large means so exp(-lambda) stays normal.
  std::int64_t total = 0;
  while (lambda > 500) {
    total += next_poisson(500);
    lambda -= 500;
  }
  const double limit = std::exp(-lambda);
  double prod = 1.0;
  std::int64_t k = 0;
  do {
    ++k;
    prod *= next_unit_open();
  } while (prod > limit);
  return total + k - 1;
}

}  // namespace sandlab::rng
