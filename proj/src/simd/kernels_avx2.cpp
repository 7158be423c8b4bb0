#include "haltsim/simd/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define HALTSIM_AVX2 1
#endif

namespace haltsim::simd::avx2 {

#ifdef HALTSIM_AVX2

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// [re0+re1, im0+im1] of interleaved lanes
inline void hsum_pairs(__m256d v, double& even, double& odd) {
  const __m128d s = _mm_add_pd(_mm256_castpd256_pd128(v), _mm256_extractf128_pd(v, 1));
  even = _mm_cvtsd_f64(s);
  odd = _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

}  // namespace

bool compiled() { return true; }

void cmul(cplx* a, const cplx* b, std::size_t n) {
  auto* pa = reinterpret_cast<double*>(a);
  const auto* pb = reinterpret_cast<const double*>(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    const __m256d br = _mm256_movedup_pd(vb);
    const __m256d bi = _mm256_permute_pd(vb, 0xF);
    const __m256d sw = _mm256_permute_pd(va, 0x5);
    _mm256_storeu_pd(pa + 2 * i, _mm256_fmaddsub_pd(va, br, _mm256_mul_pd(sw, bi)));
  }
  if (i < n) scalar::cmul(a + i, b + i, n - i);
}

double norm2(const cplx* a, std::size_t n) {
  const auto* pa = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    acc = _mm256_fmadd_pd(va, va, acc);
  }
  double s = hsum(acc);
  if (i < n) s += scalar::norm2(a + i, n - i);
  return s;
}

double weighted_norm2(const cplx* a, const double* w, std::size_t n) {
  const auto* pa = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vw = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w + i)), 0x50);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(va, va), vw, acc);
  }
  double s = hsum(acc);
  if (i < n) s += scalar::weighted_norm2(a + i, w + i, n - i);
  return s;
}

cplx inner(const cplx* a, const cplx* b, std::size_t n) {
  const auto* pa = reinterpret_cast<const double*>(a);
  const auto* pb = reinterpret_cast<const double*>(b);
  __m256d re = _mm256_setzero_pd();
  __m256d cross = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    re = _mm256_fmadd_pd(va, vb, re);                                // ar br, ai bi
    cross = _mm256_fmadd_pd(_mm256_permute_pd(va, 0x5), vb, cross);  // ai br, ar bi
  }
  double rr, ii, ibr, arbi;
  hsum_pairs(re, rr, ii);
  hsum_pairs(cross, ibr, arbi);
  cplx s{rr + ii, arbi - ibr};
  if (i < n) s += scalar::inner(a + i, b + i, n - i);
  return s;
}

#else

bool compiled() { return false; }
void cmul(cplx* a, const cplx* b, std::size_t n) { scalar::cmul(a, b, n); }
double norm2(const cplx* a, std::size_t n) { return scalar::norm2(a, n); }
double weighted_norm2(const cplx* a, const double* w, std::size_t n) { return scalar::weighted_norm2(a, w, n); }
cplx inner(const cplx* a, const cplx* b, std::size_t n) { return scalar::inner(a, b, n); }

#endif

}  // namespace haltsim::simd::avx2
