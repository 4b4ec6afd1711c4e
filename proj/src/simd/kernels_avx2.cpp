// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "vnpair/simd.hpp"

#include <immintrin.h>

#include <algorithm>
#include <vector>

namespace vnpair::simd::avx2 {
namespace {

inline const double* raw(const cd* p) { return reinterpret_cast<const double*>(p); }
inline double* raw(cd* p) { return reinterpret_cast<double*>(p); }

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

cd dotc(const cd* a, const cd* b, std::size_t n) {
  const double* pa = raw(a);
  const double* pb = raw(b);
  __m256d same = _mm256_setzero_pd();   // (ar*br, ai*bi)
  __m256d cross = _mm256_setzero_pd();  // (ar*bi, ai*br)
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    same = _mm256_fmadd_pd(va, vb, same);
    cross = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0x5), cross);
  }
  alignas(32) double s[4], c[4];
  _mm256_store_pd(s, same);
  _mm256_store_pd(c, cross);
  double re = s[0] + s[1] + s[2] + s[3];
  double im = (c[0] - c[1]) + (c[2] - c[3]);
  for (; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

double norm_sq(const cd* a, std::size_t n) {
  const double* pa = raw(a);
  const std::size_t len = 2 * n;
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d v = _mm256_loadu_pd(pa + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < len; ++i) s += pa[i] * pa[i];
  return s;
}

double diff_norm_sq(const cd* a, const cd* b, std::size_t n) {
  const double* pa = raw(a);
  const double* pb = raw(b);
  const std::size_t len = 2 * n;
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < len; ++i) {
    const double d = pa[i] - pb[i];
    s += d * d;
  }
  return s;
}

// Row of c accumulated in two buffers: p += re(a)*b, q += im(a)*swap(b); c = addsub(p, q).
void gemm(const cd* a, const cd* b, cd* c, std::size_t m, std::size_t k, std::size_t n) {
  const std::size_t len = 2 * n;
  std::vector<double> p(len), q(len);
  const double* pb = raw(b);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t kk = 0; kk < k; ++kk) {
      const cd aik = a[i * k + kk];
      if (aik == cd{}) continue;
      const __m256d ar = _mm256_set1_pd(aik.real());
      const __m256d ai = _mm256_set1_pd(aik.imag());
      const double* brow = pb + kk * len;
      std::size_t j = 0;
      for (; j + 4 <= len; j += 4) {
        __m256d vb = _mm256_loadu_pd(brow + j);
        _mm256_storeu_pd(p.data() + j, _mm256_fmadd_pd(ar, vb, _mm256_loadu_pd(p.data() + j)));
        _mm256_storeu_pd(q.data() + j,
                         _mm256_fmadd_pd(ai, _mm256_permute_pd(vb, 0x5), _mm256_loadu_pd(q.data() + j)));
      }
      for (; j < len; j += 2) {
        p[j] += aik.real() * brow[j];
        p[j + 1] += aik.real() * brow[j + 1];
        q[j] += aik.imag() * brow[j + 1];
        q[j + 1] += aik.imag() * brow[j];
      }
    }
    double* crow = raw(c + i * n);
    std::size_t j = 0;
    for (; j + 4 <= len; j += 4) {
      _mm256_storeu_pd(crow + j, _mm256_addsub_pd(_mm256_loadu_pd(p.data() + j), _mm256_loadu_pd(q.data() + j)));
    }
    for (; j < len; j += 2) {
      crow[j] = p[j] - q[j];
      crow[j + 1] = p[j + 1] + q[j + 1];
    }
  }
}

void axpy(cd alpha, const cd* x, cd* y, std::size_t n) {
  const double* px = raw(x);
  double* py = raw(y);
  const std::size_t len = 2 * n;
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d vx = _mm256_loadu_pd(px + i);
    __m256d prod = _mm256_addsub_pd(_mm256_mul_pd(ar, vx), _mm256_mul_pd(ai, _mm256_permute_pd(vx, 0x5)));
    _mm256_storeu_pd(py + i, _mm256_add_pd(_mm256_loadu_pd(py + i), prod));
  }
  for (std::size_t e = i / 2; e < n; ++e) y[e] += alpha * x[e];
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{"avx2", dotc, norm_sq, diff_norm_sq, gemm, axpy};
  return t;
}

}  // namespace vnpair::simd::avx2
