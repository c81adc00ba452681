// AVX2 variants of the data-parallel kernels. This translation unit is the
// only one compiled with -mavx2/-mfma; callers reach it through the runtime
// dispatch in kernels.cpp.

#include <immintrin.h>

#include <cmath>

#include "specfp/kernels.hpp"

namespace specfp::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i), acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i] * y[i];
  return hsum(acc) + tail;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(av, _mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i));
    _mm256_storeu_pd(y.data() + i, r);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale(std::span<double> x, double a) {
  const std::size_t n = x.size();
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x.data() + i, _mm256_mul_pd(av, _mm256_loadu_pd(x.data() + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

double sum(std::span<const double> x) {
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x.data() + i));
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i];
  return hsum(acc) + tail;
}

void magnitude_accumulate(std::span<const std::complex<double>> z, std::span<double> acc) {
  const std::size_t n = z.size();
  const double* zd = reinterpret_cast<const double*>(z.data());
  std::size_t i = 0;
  // Four complex values per iteration. Plain mul/add (no FMA) so the
  // per-element rounding matches the scalar backend exactly.
  for (; i + 4 <= n; i += 4) {
    __m256d v0 = _mm256_loadu_pd(zd + 2 * i);      // re0 im0 re1 im1
    __m256d v1 = _mm256_loadu_pd(zd + 2 * i + 4);  // re2 im2 re3 im3
    __m256d s0 = _mm256_mul_pd(v0, v0);
    __m256d s1 = _mm256_mul_pd(v1, v1);
    __m256d h = _mm256_hadd_pd(s0, s1);  // m0 m2 m1 m3
    __m256d m = _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0));
    __m256d out = _mm256_add_pd(_mm256_loadu_pd(acc.data() + i), _mm256_sqrt_pd(m));
    _mm256_storeu_pd(acc.data() + i, out);
  }
  for (; i < n; ++i) {
    const double re = z[i].real(), im = z[i].imag();
    acc[i] += std::sqrt(re * re + im * im);
  }
}

}  // namespace specfp::kernels::avx2
