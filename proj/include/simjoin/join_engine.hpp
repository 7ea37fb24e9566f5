// SPDX-License-Identifier: Apache-2.0
//
// Grid self-join. For every query point p the engine probes the adjacent
// non-empty cells of p's cell and emits (p, q) for every q with
// |p - q|^2 <= eps^2. Output is produced in batches: query ids are split
// into contiguous ranges, each range is joined (optionally across several
// workers), its pairs are sorted by (key, value) and handed to a sink.
//
// In unicomp mode a query scans its home cell emitting (p, q) only, and for
// each dimension j in which its cell coordinate is odd scans the cells that
// differ in dimension j, are free (within the masked ranges) in dimensions
// below j, and equal in dimensions above j. Hits there are emitted in both
// directions. Every cross-cell pair of adjacent cells is evaluated exactly
// once: in the highest dimension where the two cells differ, exactly one of
// them has an odd coordinate.

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "simjoin/dataset.hpp"
#include "simjoin/grid_index.hpp"
#include "simjoin/simd/distance_kernels.hpp"

namespace simjoin {

class JoinError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class JoinMode { baseline, unicomp };

std::string_view to_string(JoinMode mode);
std::optional<JoinMode> parse_mode(std::string_view name);

struct ResultPair {
  PointId key;
  PointId value;
  friend auto operator<=>(const ResultPair&, const ResultPair&) = default;
};

struct ResultBatch {
  std::size_t batch_index = 0;
  std::vector<ResultPair> pairs;  ///< sorted by (key, value)
};

struct JoinConfig {
  double eps = 0.0;
  JoinMode mode = JoinMode::baseline;
  bool include_self_pairs = true;
  /// Target pairs per batch; the planner sizes batches to fit it.
  std::size_t buffer_capacity = std::size_t{1} << 24;
  std::size_t min_batches = 3;
  std::size_t workers = 1;
  /// Kernel variant; the best supported one when unset.
  std::optional<simd::Level> simd;

  void validate() const;
};

/// Hardware-independent work counters.
struct JoinStats {
  std::uint64_t cells_probed = 0;       ///< lookups in B
  std::uint64_t candidates_tested = 0;  ///< distance evaluations
  std::uint64_t pairs_emitted = 0;
  std::uint64_t batches = 0;

  JoinStats& operator+=(const JoinStats& o) {
    cells_probed += o.cells_probed;
    candidates_tested += o.candidates_tested;
    pairs_emitted += o.pairs_emitted;
    batches += o.batches;
    return *this;
  }
  friend bool operator==(const JoinStats&, const JoinStats&) = default;
};

class ResultSink {
 public:
  virtual ~ResultSink() = default;
  virtual void consume(const ResultBatch& batch) = 0;
};

/// Keeps every batch in memory.
class MemorySink final : public ResultSink {
 public:
  void consume(const ResultBatch& batch) override { batches_.push_back(batch); }
  const std::vector<ResultBatch>& batches() const { return batches_; }
  /// Batches concatenated in delivery order.
  std::vector<ResultPair> concatenated() const;
  /// Concatenation sorted by (key, value).
  std::vector<ResultPair> sorted_pairs() const;

 private:
  std::vector<ResultBatch> batches_;
};

class CountingSink final : public ResultSink {
 public:
  void consume(const ResultBatch& batch) override {
    pairs_ += batch.pairs.size();
    ++batches_;
  }
  std::uint64_t pairs() const { return pairs_; }
  std::uint64_t batches() const { return batches_; }

 private:
  std::uint64_t pairs_ = 0;
  std::uint64_t batches_ = 0;
};

/// Writes "key,value" lines, one per pair, in delivery order.
class PairFileSink final : public ResultSink {
 public:
  explicit PairFileSink(const std::filesystem::path& path);
  void consume(const ResultBatch& batch) override;
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

void write_pairs(std::ostream& os, const std::vector<ResultPair>& pairs);

struct QueryRange {
  PointId begin;
  PointId end;  ///< exclusive
  double estimated_pairs;
};

struct BatchPlan {
  std::vector<QueryRange> ranges;
  double estimated_total = 0.0;
  std::size_t sample_size = 0;
};

/// max(min_batches, ceil(estimated_pairs / capacity)).
std::size_t batch_count_for(double estimated_pairs, std::size_t capacity, std::size_t min_batches);

/// Splits query ids into contiguous ranges. The total is estimated by an
/// exact neighbor count over an evenly strided sample of max(1%, 1000)
/// query points, scaled to |D|. Ranges estimated above 2x capacity are
/// halved until they fit or hold a single query.
BatchPlan plan_batches(const Dataset& d, const GridIndex& index, const JoinConfig& cfg);

/// Runs the self-join and streams sorted batches to `sink` in plan order.
/// An exception thrown by the sink aborts the join with JoinError after the
/// failing batch.
JoinStats self_join(const Dataset& d, const GridIndex& index, const JoinConfig& cfg, ResultSink& sink);

struct CountResult {
  std::uint64_t total_pairs = 0;
  JoinStats stats;
};

/// Same traversal as self_join without materializing pairs.
CountResult count_only_join(const Dataset& d, const GridIndex& index, const JoinConfig& cfg);

/// Neighbor cells a query in cell `c` scans in unicomp mode, excluding the
/// home cell, in scan order.
std::vector<CellCoord> unicomp_cells(const CellCoord& c, const MaskedRanges& masked);

/// Per-query view of the index search, for inspection and tests.
struct ProbeTrace {
  CellCoord home;
  AdjacentRanges adjacent{};
  MaskedRanges masked;
  std::vector<LinearId> probed;  ///< every id looked up in B, in order
  std::vector<LinearId> found;   ///< the subset present in B
  std::vector<PointId> neighbors;
};

ProbeTrace trace_query(const Dataset& d, const GridIndex& index, PointId query, JoinMode mode,
                       bool include_self_pairs = true);

}  // namespace simjoin
