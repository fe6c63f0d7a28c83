#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace lacuna {

std::uint64_t splitmix64(std::uint64_t& state);

// Counter-mode seed for stream `index` of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Uses only the engine's raw output so streams are identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();                       // [0, 1)
  std::uint64_t below(std::uint64_t n);   // uniform in [0, n)
  double normal();
  double sign() { return (next() >> 63) ? 1.0 : -1.0; }
  std::complex<double> phase();
  std::complex<double> complex_normal();  // E|z|^2 = 1

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lacuna
