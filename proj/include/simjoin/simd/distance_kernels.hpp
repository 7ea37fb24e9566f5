// SPDX-License-Identifier: Apache-2.0
//
// Range-filter kernels: given a query point and a contiguous run of
// candidate points stored column-wise, report which candidates lie within
// squared distance eps2. One scalar reference plus ISA variants picked at
// runtime. All variants accumulate
//
//   s = 0; for j in 0..n-1: d = cand[j] - query[j]; s = s + d * d
//
// lane by lane with separate multiply and add, so every variant (and the
// brute-force oracle) produces bit-identical squared distances.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace simjoin::simd {

enum class Level { scalar, avx2, neon };

std::string_view to_string(Level level);
std::optional<Level> parse_level(std::string_view name);

/// Column-major view over candidate coordinates: cols[j][k] is dimension j of
/// candidate k.
struct Columns {
  const double* const* cols;
  std::size_t dims;
};

/// Writes the offsets k in [begin, end) with squared distance <= eps2 to
/// `hits` (capacity >= end - begin), ascending, and returns their count.
using FilterFn = std::size_t (*)(const double* query, Columns cands, std::size_t begin,
                                 std::size_t end, double eps2, std::uint32_t* hits);

/// Writes all squared distances for [begin, end) into `out`. Used to check
/// bitwise agreement between variants.
using DistanceFn = void (*)(const double* query, Columns cands, std::size_t begin,
                            std::size_t end, double* out);

struct Kernels {
  Level level;
  FilterFn filter;
  DistanceFn distances;
};

/// Squared Euclidean distance in the canonical accumulation order.
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = b[j] - a[j];
    s = s + d * d;
  }
  return s;
}

bool supported(Level level);

/// Best level the running CPU supports, unless SIMJOIN_SIMD names another
/// supported level.
Level detect();

/// Throws std::invalid_argument when `level` is not supported on this CPU.
const Kernels& kernels(Level level);
const Kernels& best_kernels();

namespace detail {
std::size_t filter_scalar(const double*, Columns, std::size_t, std::size_t, double, std::uint32_t*);
void distances_scalar(const double*, Columns, std::size_t, std::size_t, double*);
#if defined(__x86_64__) || defined(_M_X64)
std::size_t filter_avx2(const double*, Columns, std::size_t, std::size_t, double, std::uint32_t*);
void distances_avx2(const double*, Columns, std::size_t, std::size_t, double*);
#endif
#if defined(__aarch64__)
std::size_t filter_neon(const double*, Columns, std::size_t, std::size_t, double, std::uint32_t*);
void distances_neon(const double*, Columns, std::size_t, std::size_t, double*);
#endif
}  // namespace detail

}  // namespace simjoin::simd
