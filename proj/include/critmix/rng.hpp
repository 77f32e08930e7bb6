#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace critmix {

// Seeded RNG with platform-independent output. std::mt19937_64 is fully
// specified by the standard; the distributions below are hand-rolled because
// std::uniform_real_distribution and friends are implementation-defined,
// which would break byte-identical replays and committed fixtures.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // Uniform on [0,1) with 53 random bits.
  double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Multiply-shift map; the bias is O(n/2^64) and
  // it consumes exactly one engine draw, which keeps stream positions
  // resumable by a plain discard().
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

  double exponential(double rate) { return -std::log1p(-u01()) / rate; }

  void discard(std::uint64_t z) { eng_.discard(z); }

 private:
  std::mt19937_64 eng_;
};

// SplitMix64 step, used to derive independent stream seeds from a master
// seed (one per replica / per experiment component).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace critmix
