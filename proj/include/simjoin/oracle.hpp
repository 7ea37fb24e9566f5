// SPDX-License-Identifier: Apache-2.0
//
// Exact O(|D|^2) nested-loop self-join used to validate the grid engine.
// Intended for |D| <= kOracleMaxPoints.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "simjoin/dataset.hpp"
#include "simjoin/join_engine.hpp"

namespace simjoin::oracle {

inline constexpr std::size_t kOracleMaxPoints = 100000;

struct OracleResult {
  std::vector<ResultPair> pairs;  ///< sorted by (key, value)
  JoinStats stats;
};

/// Every ordered pair (p, q) with squared distance <= eps^2. Every ordered
/// pair is evaluated, so candidates_tested = |D|^2.
OracleResult brute_force(const Dataset& d, double eps, bool include_self_pairs,
                         std::size_t workers = 1);

/// Pair total only; same counters as brute_force.
CountResult brute_force_count(const Dataset& d, double eps, bool include_self_pairs,
                              std::size_t workers = 1);

}  // namespace simjoin::oracle
