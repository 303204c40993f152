// Reference kernels. These define the canonical arithmetic order the SIMD variants reproduce.

#include <cmath>

#include "icecav/kernels.hpp"

namespace icecav::kernels::scalar {

double gather_dot(const double* w, const std::int32_t* idx, std::size_t n, const double* values) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    lane[0] = lane[0] + w[i + 0] * values[idx[i + 0]];
    lane[1] = lane[1] + w[i + 1] * values[idx[i + 1]];
    lane[2] = lane[2] + w[i + 2] * values[idx[i + 2]];
    lane[3] = lane[3] + w[i + 3] * values[idx[i + 3]];
  }
  double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t i = n4; i < n; ++i) total = total + w[i] * values[idx[i]];
  return total;
}

void inverse_distances(const double* fx, const double* fy, const double* fz, std::size_t n, double* out) {
  for (int c = 0; c < 8; ++c) {
    const double cx = c & 1, cy = (c >> 1) & 1, cz = (c >> 2) & 1;
    double* o = out + std::size_t(c) * n;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = fx[i] - cx;
      const double dy = fy[i] - cy;
      const double dz = fz[i] - cz;
      const double d2 = (dx * dx + dy * dy) + dz * dz;
      o[i] = 1.0 / std::sqrt(d2);
    }
  }
}

}  // namespace icecav::kernels::scalar
