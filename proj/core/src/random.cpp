#include "gct/random.hpp"

#include <cmath>
#include <limits>

namespace gct {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

double Rng::exponential(double rate) {
  const double e = -std::log1p(-uniform());
  return rate > 0.0 ? e / rate : std::numeric_limits<double>::infinity();
}

}  // namespace gct
