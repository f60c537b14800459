#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

namespace flowercell {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream tags keep independent uses of one (seed, stream) apart.
enum class StreamTag : std::uint64_t { Points = 1, Lines = 2, Nucleus = 3, Misc = 4 };

// mt19937_64 keyed by a SplitMix64 hash of (seed, stream, tag, index).
// Distributions come from Boost so the draws do not depend on the standard library.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream, StreamTag tag, std::uint64_t index)
      : engine_(key(seed, stream, static_cast<std::uint64_t>(tag), index)) {}

  static std::uint64_t key(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag, std::uint64_t index) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ stream);
    h = splitmix64(h ^ (tag << 56));
    return splitmix64(h ^ index);
  }

  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  long long poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    boost::random::poisson_distribution<long long, double> dist(mean);
    return dist(engine_);
  }

  double normal(double sd) {
    boost::random::normal_distribution<double> dist(0.0, sd);
    return dist(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace flowercell
