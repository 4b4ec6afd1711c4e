#pragma once

#include <complex>
#include <cstddef>

namespace vnpair::simd {

using cd = std::complex<double>;

// Dense complex kernels over contiguous row-major storage.
struct KernelTable {
  const char* name;
  cd (*dotc)(const cd* a, const cd* b, std::size_t n);  // sum conj(a_i) b_i
  double (*norm_sq)(const cd* a, std::size_t n);
  double (*diff_norm_sq)(const cd* a, const cd* b, std::size_t n);
  // c (m x n) = a (m x k) * b (k x n); c must not alias a or b
  void (*gemm)(const cd* a, const cd* b, cd* c, std::size_t m, std::size_t k, std::size_t n);
  void (*axpy)(cd alpha, const cd* x, cd* y, std::size_t n);  // y += alpha x
};

const KernelTable& scalar_kernels();

// nullptr when the build has no AVX2 variant or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

// Chosen once per process. VNPAIR_SIMD=scalar forces the reference kernels.
const KernelTable& active_kernels();

}  // namespace vnpair::simd
