// SPDX-License-Identifier: Apache-2.0
//
// Built only for aarch64. vmulq/vaddq are issued separately (never vfmaq)
// to keep lanes identical to the scalar reference.

#include <arm_neon.h>

#include "simjoin/simd/distance_kernels.hpp"

namespace simjoin::simd::detail {

namespace {

inline float64x2_t block_distance(const double* query, Columns c, std::size_t k) {
  float64x2_t s = vdupq_n_f64(0.0);
  for (std::size_t j = 0; j < c.dims; ++j) {
    const float64x2_t d = vsubq_f64(vld1q_f64(c.cols[j] + k), vdupq_n_f64(query[j]));
    s = vaddq_f64(s, vmulq_f64(d, d));
  }
  return s;
}

}  // namespace

std::size_t filter_neon(const double* query, Columns cands, std::size_t begin, std::size_t end,
                        double eps2, std::uint32_t* hits) {
  const float64x2_t limit = vdupq_n_f64(eps2);
  std::size_t n = 0;
  std::size_t k = begin;
  for (; k + 2 <= end; k += 2) {
    const uint64x2_t le = vcleq_f64(block_distance(query, cands, k), limit);
    if (vgetq_lane_u64(le, 0)) hits[n++] = static_cast<std::uint32_t>(k);
    if (vgetq_lane_u64(le, 1)) hits[n++] = static_cast<std::uint32_t>(k + 1);
  }
  if (k < end) n += filter_scalar(query, cands, k, end, eps2, hits + n);
  return n;
}

void distances_neon(const double* query, Columns cands, std::size_t begin, std::size_t end,
                    double* out) {
  std::size_t k = begin;
  for (; k + 2 <= end; k += 2, out += 2) vst1q_f64(out, block_distance(query, cands, k));
  if (k < end) distances_scalar(query, cands, k, end, out);
}

}  // namespace simjoin::simd::detail
