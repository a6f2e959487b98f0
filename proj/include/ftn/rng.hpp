#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace ftn {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// One Gaussian source per (master seed, stream index). Streams are derived
// by counter, not by drawing from each other, so realization r's samples do
// not depend on how many realizations ran before it or on which thread ran
// it.
class Substream {
 public:
  Substream(std::uint64_t master_seed, std::uint64_t stream)
      : eng_(detail::splitmix64(detail::splitmix64(master_seed) ^
                                detail::splitmix64(stream + 0x51a7b2ecULL))) {}

  double gauss() { return normal_(eng_); }

  // CN(0, var): real and imaginary parts each N(0, var/2).
  std::complex<double> cgauss(double var) {
    const double s = std::sqrt(var / 2.0);
    return {s * gauss(), s * gauss()};
  }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_;
};

}  // namespace ftn
