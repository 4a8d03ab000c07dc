#include "cauchyfem/rng.hpp"

#include <cmath>

namespace cauchyfem {

double GaussianSampler::normal() {
  // Box-Muller on (0,1] uniforms; log(u1) is finite because u1 > 0.
  const double u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Vector GaussianSampler::normal_vector(int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = normal();
  return v;
}

}  // namespace cauchyfem
