// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "simjoin/simd/distance_kernels.hpp"

namespace simjoin::simd {

namespace {

constexpr Kernels kScalar{Level::scalar, detail::filter_scalar, detail::distances_scalar};
#if defined(__x86_64__) || defined(_M_X64)
constexpr Kernels kAvx2{Level::avx2, detail::filter_avx2, detail::distances_avx2};
#endif
#if defined(__aarch64__)
constexpr Kernels kNeon{Level::neon, detail::filter_neon, detail::distances_neon};
#endif

}  // namespace

std::string_view to_string(Level level) {
  switch (level) {
    case Level::scalar: return "scalar";
    case Level::avx2: return "avx2";
    case Level::neon: return "neon";
  }
  return "unknown";
}

std::optional<Level> parse_level(std::string_view name) {
  if (name == "scalar") return Level::scalar;
  if (name == "avx2") return Level::avx2;
  if (name == "neon") return Level::neon;
  return std::nullopt;
}

bool supported(Level level) {
  switch (level) {
    case Level::scalar: return true;
    case Level::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Level::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Level detect() {
  if (const char* env = std::getenv("SIMJOIN_SIMD")) {
    if (auto forced = parse_level(env); forced && supported(*forced)) return *forced;
  }
  if (supported(Level::avx2)) return Level::avx2;
  if (supported(Level::neon)) return Level::neon;
  return Level::scalar;
}

const Kernels& kernels(Level level) {
  if (!supported(level)) {
    throw std::invalid_argument("SIMD level " + std::string(to_string(level)) +
                                " is not supported on this CPU");
  }
  switch (level) {
#if defined(__x86_64__) || defined(_M_X64)
    case Level::avx2: return kAvx2;
#endif
#if defined(__aarch64__)
    case Level::neon: return kNeon;
#endif
    default: return kScalar;
  }
}

const Kernels& best_kernels() {
  static const Kernels& k = kernels(detect());
  return k;
}

}  // namespace simjoin::simd
