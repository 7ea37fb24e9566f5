// SPDX-License-Identifier: Apache-2.0

#include "simjoin/simd/distance_kernels.hpp"

namespace simjoin::simd::detail {

namespace {

inline double lane_distance(const double* query, Columns c, std::size_t k) {
  double s = 0.0;
  for (std::size_t j = 0; j < c.dims; ++j) {
    const double d = c.cols[j][k] - query[j];
    s = s + d * d;
  }
  return s;
}

}  // namespace

std::size_t filter_scalar(const double* query, Columns cands, std::size_t begin, std::size_t end,
                          double eps2, std::uint32_t* hits) {
  std::size_t n = 0;
  for (std::size_t k = begin; k < end; ++k) {
    if (lane_distance(query, cands, k) <= eps2) hits[n++] = static_cast<std::uint32_t>(k);
  }
  return n;
}

void distances_scalar(const double* query, Columns cands, std::size_t begin, std::size_t end,
                      double* out) {
  for (std::size_t k = begin; k < end; ++k) *out++ = lane_distance(query, cands, k);
}

}  // namespace simjoin::simd::detail
