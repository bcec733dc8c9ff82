#pragma once

#include <cstdint>
#include <random>

namespace resmg {

// Deterministic uniform doubles on top of mt19937_64.  The raw engine is
// fully specified by the standard; std::uniform_real_distribution is not,
// so bit reproducibility requires generating mantissas by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // uniform in [-1, 1)
  double symmetric() { return 2.0 * uniform() - 1.0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace resmg
