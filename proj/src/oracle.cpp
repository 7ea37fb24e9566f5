// SPDX-License-Identifier: Apache-2.0

#include "simjoin/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "simjoin/simd/distance_kernels.hpp"

namespace simjoin::oracle {

namespace {

template <class Emit>
void nested_loop(const Dataset& d, double eps, bool include_self_pairs, std::size_t workers,
                 std::vector<JoinStats>& stats, Emit&& make_emit) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw JoinError("eps must be positive and finite");
  if (workers < 1) throw JoinError("workers must be at least 1");
  const double eps2 = eps * eps;
  const std::size_t n = d.size();
  const std::size_t chunks = std::max<std::size_t>(1, std::min(workers, n));
  stats.assign(chunks, {});

  auto body = [&](std::size_t w) {
    auto emit = make_emit(w);
    JoinStats& st = stats[w];
    for (std::size_t p = n * w / chunks; p < n * (w + 1) / chunks; ++p) {
      const auto a = d.point(p);
      for (std::size_t q = 0; q < n; ++q) {
        ++st.candidates_tested;
        if (p == q && !include_self_pairs) continue;
        if (simd::squared_distance(a, d.point(q)) <= eps2) {
          emit(static_cast<PointId>(p), static_cast<PointId>(q));
          ++st.pairs_emitted;
        }
      }
    }
  };
  if (chunks == 1) {
    body(0);
    return;
  }
  std::vector<std::jthread> threads;
  for (std::size_t w = 0; w < chunks; ++w) threads.emplace_back(body, w);
}

}  // namespace

OracleResult brute_force(const Dataset& d, double eps, bool include_self_pairs, std::size_t workers) {
  std::vector<std::vector<ResultPair>> local(std::max<std::size_t>(1, workers));
  std::vector<JoinStats> stats;
  nested_loop(d, eps, include_self_pairs, workers, stats, [&](std::size_t w) {
    return [&out = local[w]](PointId p, PointId q) { out.push_back({p, q}); };
  });
  OracleResult r;
  for (std::size_t w = 0; w < stats.size(); ++w) {
    r.stats += stats[w];
    r.pairs.insert(r.pairs.end(), local[w].begin(), local[w].end());
  }
  // Chunks are contiguous query ranges emitted in (p, q) order already.
  std::sort(r.pairs.begin(), r.pairs.end());
  return r;
}

CountResult brute_force_count(const Dataset& d, double eps, bool include_self_pairs,
                              std::size_t workers) {
  std::vector<JoinStats> stats;
  nested_loop(d, eps, include_self_pairs, workers, stats,
              [](std::size_t) { return [](PointId, PointId) {}; });
  CountResult r;
  for (const auto& s : stats) r.stats += s;
  r.total_pairs = r.stats.pairs_emitted;
  return r;
}

}  // namespace simjoin::oracle
