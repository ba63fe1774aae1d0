#ifndef MEC4C_RANDOM_HPP_
#define MEC4C_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <string>

#include "mec4c/errors.hpp"

namespace mec4c
{

using Rng = std::mt19937_64;

// Closed interval used for uniformly drawn scenario parameters.
struct Range
{
  double lo = 0.0;
  double hi = 0.0;

  static Range point(double v) {return Range{v, v};}

  void validate(const std::string & name) const
  {
    if (!(lo <= hi)) {
      throw ParameterError(name + ": invalid range [" + std::to_string(lo) + ", " +
              std::to_string(hi) + "]");
    }
  }

  double mid() const {return 0.5 * (lo + hi);}
  bool contains(double v) const {return v >= lo && v <= hi;}

  double draw(Rng & rng) const
  {
    if (lo == hi) {
      return lo;
    }
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng);
  }
};

// Derives independent sub-seeds so that adding a draw in one generator
// does not shift the stream of another.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace mec4c

#endif  // MEC4C_RANDOM_HPP_
