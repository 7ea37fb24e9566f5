// SPDX-License-Identifier: Apache-2.0
//
// Compiled with -mavx2 only (no -mfma): products and sums stay separate so
// lanes match the scalar reference bit for bit.

#include <immintrin.h>

#include "simjoin/simd/distance_kernels.hpp"

namespace simjoin::simd::detail {

namespace {

inline __m256d block_distance(const double* query, Columns c, std::size_t k) {
  __m256d s = _mm256_setzero_pd();
  for (std::size_t j = 0; j < c.dims; ++j) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(c.cols[j] + k), _mm256_set1_pd(query[j]));
    s = _mm256_add_pd(s, _mm256_mul_pd(d, d));
  }
  return s;
}

}  // namespace

std::size_t filter_avx2(const double* query, Columns cands, std::size_t begin, std::size_t end,
                        double eps2, std::uint32_t* hits) {
  const __m256d limit = _mm256_set1_pd(eps2);
  std::size_t n = 0;
  std::size_t k = begin;
  for (; k + 4 <= end; k += 4) {
    const __m256d s = block_distance(query, cands, k);
    unsigned mask = static_cast<unsigned>(_mm256_movemask_pd(_mm256_cmp_pd(s, limit, _CMP_LE_OQ)));
    while (mask) {
      const unsigned lane = static_cast<unsigned>(__builtin_ctz(mask));
      hits[n++] = static_cast<std::uint32_t>(k + lane);
      mask &= mask - 1;
    }
  }
  if (k < end) n += filter_scalar(query, cands, k, end, eps2, hits + n);
  return n;
}

void distances_avx2(const double* query, Columns cands, std::size_t begin, std::size_t end,
                    double* out) {
  std::size_t k = begin;
  for (; k + 4 <= end; k += 4, out += 4) _mm256_storeu_pd(out, block_distance(query, cands, k));
  if (k < end) distances_scalar(query, cands, k, end, out);
}

}  // namespace simjoin::simd::detail
