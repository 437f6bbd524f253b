// Compiled with -mavx2 only; reached solely through runtime dispatch.
#include <immintrin.h>

#include "lakecausal/simd/kernels.hpp"

namespace lakecausal::simd::detail {

void conv9_avx2(const double* padded, std::size_t n, std::size_t dilation,
                const double* weights, double* out) {
  __m256d w[9];
  for (int j = 0; j < 9; ++j) w[j] = _mm256_set1_pd(weights[j]);

  std::size_t t = 0;
  for (; t + 4 <= n; t += 4) {
    __m256d acc = _mm256_mul_pd(w[0], _mm256_loadu_pd(padded + t));
    for (std::size_t j = 1; j < 9; ++j) {
      acc = _mm256_add_pd(acc, _mm256_mul_pd(w[j], _mm256_loadu_pd(padded + t + j * dilation)));
    }
    _mm256_storeu_pd(out + t, acc);
  }
  if (t < n) conv9_scalar(padded + t, n - t, dilation, weights, out + t);
}

std::size_t count_greater_avx2(const double* values, std::size_t n, double threshold) {
  const __m256d thr = _mm256_set1_pd(threshold);
  // A hit compares to all-ones (-1 as int64), so subtracting the mask counts up.
  __m256i lanes = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gt = _mm256_cmp_pd(_mm256_loadu_pd(values + i), thr, _CMP_GT_OQ);
    lanes = _mm256_sub_epi64(lanes, _mm256_castpd_si256(gt));
  }
  alignas(32) long long buf[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(buf), lanes);
  std::size_t count = static_cast<std::size_t>(buf[0] + buf[1] + buf[2] + buf[3]);
  return count + count_greater_scalar(values + i, n - i, threshold);
}

}  // namespace lakecausal::simd::detail
