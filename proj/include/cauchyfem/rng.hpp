#pragma once

#include <cstdint>
#include <random>

#include "cauchyfem/fem.hpp"

namespace cauchyfem {

// Seeded gaussian draws with a fixed algorithm (mt19937_64 + Box-Muller) so
// that results are bit-identical across platforms; std::normal_distribution
// is implementation-defined and must not be used here.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : gen_(seed) {}

  // Uniform in (0, 1].
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal();
  Vector normal_vector(int n);

 private:
  std::mt19937_64 gen_;
};

}  // namespace cauchyfem
