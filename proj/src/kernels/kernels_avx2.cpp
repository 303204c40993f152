// AVX2 variants. Compiled with -mavx2 only (no FMA) so every lane rounds exactly like the
// scalar reference.

#include "icecav/kernels.hpp"

#if defined(ICECAV_HAVE_AVX2_TU) && defined(__AVX2__)
#include <immintrin.h>

namespace icecav::kernels::avx2 {

double gather_dot(const double* w, const std::int32_t* idx, std::size_t n, const double* values) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
    const __m256d vv = _mm256_i32gather_pd(values, vi, 8);
    const __m256d vw = _mm256_loadu_pd(w + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(vw, vv));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t i = n4; i < n; ++i) total = total + w[i] * values[idx[i]];
  return total;
}

void inverse_distances(const double* fx, const double* fy, const double* fz, std::size_t n, double* out) {
  const std::size_t n4 = n - n % 4;
  const __m256d one = _mm256_set1_pd(1.0);
  for (int c = 0; c < 8; ++c) {
    const __m256d cx = _mm256_set1_pd(c & 1), cy = _mm256_set1_pd((c >> 1) & 1), cz = _mm256_set1_pd((c >> 2) & 1);
    double* o = out + std::size_t(c) * n;
    for (std::size_t i = 0; i < n4; i += 4) {
      const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(fx + i), cx);
      const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(fy + i), cy);
      const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(fz + i), cz);
      const __m256d d2 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), _mm256_mul_pd(dz, dz));
      _mm256_storeu_pd(o + i, _mm256_div_pd(one, _mm256_sqrt_pd(d2)));
    }
  }
  if (n4 < n) {
    // Tail through the reference path: same per-element arithmetic.
    const std::size_t rem = n - n4;
    double tail[8 * 3];
    scalar::inverse_distances(fx + n4, fy + n4, fz + n4, rem, tail);
    for (int c = 0; c < 8; ++c) {
      for (std::size_t i = 0; i < rem; ++i) out[std::size_t(c) * n + n4 + i] = tail[std::size_t(c) * rem + i];
    }
  }
}

}  // namespace icecav::kernels::avx2

#else

#include <stdexcept>

namespace icecav::kernels::avx2 {

double gather_dot(const double*, const std::int32_t*, std::size_t, const double*) {
  throw std::runtime_error("AVX2 kernels not built");
}

void inverse_distances(const double*, const double*, const double*, std::size_t, double*) {
  throw std::runtime_error("AVX2 kernels not built");
}

}  // namespace icecav::kernels::avx2

#endif
