#pragma once

#include <cstdint>
#include <random>

namespace fdlab {

// Deterministic random source.  std::mt19937_64 produces a bit-exact stream
// across platforms, but the standard distribution adapters do not, so the
// variates are derived from raw engine words here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 significant bits.
  double uniform();

  // Standard normal via Box-Muller on two uniforms; pairs are cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fdlab
