#include <cstdlib>
#include <cstring>

#include "vnpair/simd.hpp"

namespace vnpair::simd {

#if defined(VNPAIR_HAVE_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif

const KernelTable* avx2_kernels() {
#if defined(VNPAIR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok ? &avx2::table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable* chosen = [] {
    const char* env = std::getenv("VNPAIR_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
    if (const KernelTable* v = avx2_kernels()) return v;
    return &scalar_kernels();
  }();
  return *chosen;
}

}  // namespace vnpair::simd
