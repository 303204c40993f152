#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace icecav::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// sum_i w[i] * values[idx[i]].
///
/// Reduction order is fixed: elements i < n - n % 4 accumulate into lane i % 4, lanes combine
/// as (l0 + l1) + (l2 + l3), then the tail adds in order. Every ISA reproduces this order, so
/// results are bit-identical across implementations.
using GatherDotFn = double (*)(const double* w, const std::int32_t* idx, std::size_t n, const double* values);

/// Inverse stride-normalised distances from a batch of points to the 8 corners of their cells.
///
/// Point i has in-cell offsets (fx[i], fy[i], fz[i]) in [0, 1]. Corner c has offsets
/// (c & 1, (c >> 1) & 1, (c >> 2) & 1); out[c * n + i] = 1 / sqrt(dx*dx + dy*dy + dz*dz),
/// +inf when the point sits on the corner.
using InverseDistanceFn = void (*)(const double* fx, const double* fy, const double* fz, std::size_t n,
                                   double* out);

struct KernelTable {
  Isa isa;
  GatherDotFn gather_dot;
  InverseDistanceFn inverse_distances;
};

bool isa_supported(Isa isa);

/// Table for a specific ISA; throws std::runtime_error if the CPU or build lacks it.
const KernelTable& kernels_for(Isa isa);

/// Best supported ISA, unless ICECAV_SIMD=scalar|avx2 overrides it. Chosen once per process.
const KernelTable& active_kernels();

namespace scalar {
double gather_dot(const double* w, const std::int32_t* idx, std::size_t n, const double* values);
void inverse_distances(const double* fx, const double* fy, const double* fz, std::size_t n, double* out);
}  // namespace scalar

namespace avx2 {
double gather_dot(const double* w, const std::int32_t* idx, std::size_t n, const double* values);
void inverse_distances(const double* fx, const double* fy, const double* fz, std::size_t n, double* out);
}  // namespace avx2

}  // namespace icecav::kernels
