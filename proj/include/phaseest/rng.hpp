#pragma once

#include <cstdint>
#include <random>

namespace phaseest {

// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

// Child seed for (master, a, b). Used as derive_seed(master, M, repetition)
// for experiment runs and derive_seed(run_seed, stage, 0) for the two stages
// of an adaptive run:
//   h = mix64(master ^ 0x9e3779b97f4a7c15)
//   h = mix64(h ^ mix64(a + 0xbf58476d1ce4e5b9))
//   h = mix64(h ^ mix64(b + 0x94d049bb133111eb))
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

// Standard normal deviates from std::mt19937_64 through the Marsaglia polar
// method. Uniforms are (word >> 11)·2⁻⁵³. The engine sequence is fixed by the
// C++ standard and the transform is ours, so streams do not depend on the
// standard library's distribution implementations.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next();

 private:
  double uniform();

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace phaseest
