#include <cstdlib>
#include <stdexcept>
#include <string>

#include "icecav/kernels.hpp"

namespace icecav::kernels {

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(ICECAV_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& kernels_for(Isa isa) {
  static const KernelTable scalar_table{Isa::scalar, &scalar::gather_dot, &scalar::inverse_distances};
  static const KernelTable avx2_table{Isa::avx2, &avx2::gather_dot, &avx2::inverse_distances};
  if (!isa_supported(isa)) throw std::runtime_error("ISA " + std::string(to_string(isa)) + " not supported here");
  return isa == Isa::avx2 ? avx2_table : scalar_table;
}

const KernelTable& active_kernels() {
  static const KernelTable& table = [] () -> const KernelTable& {
    if (const char* env = std::getenv("ICECAV_SIMD")) {
      const std::string want(env);
      if (want == "scalar") return kernels_for(Isa::scalar);
      if (want == "avx2" && isa_supported(Isa::avx2)) return kernels_for(Isa::avx2);
    }
    return isa_supported(Isa::avx2) ? kernels_for(Isa::avx2) : kernels_for(Isa::scalar);
  }();
  return table;
}

}  // namespace icecav::kernels
