// SPDX-License-Identifier: Apache-2.0

#include "simjoin/join_engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

namespace simjoin {

namespace {

/// Up to three candidate coordinates per dimension.
struct CoordLists {
  std::array<std::array<std::int64_t, 3>, kMaxJoinDims> v{};
  std::array<std::uint8_t, kMaxJoinDims> n{};
  std::size_t dims = 0;
};

/// Calls fn(coords) for every tuple of the Cartesian product, dimension 0
/// outermost.
template <class Fn>
void for_each_tuple(const CoordLists& lists, Fn&& fn) {
  for (std::size_t j = 0; j < lists.dims; ++j) {
    if (lists.n[j] == 0) return;
  }
  std::array<std::uint8_t, kMaxJoinDims> pos{};
  CellCoord c;
  c.dims = lists.dims;
  while (true) {
    for (std::size_t j = 0; j < lists.dims; ++j) c[j] = lists.v[j][pos[j]];
    fn(c);
    std::size_t j = lists.dims;
    while (j-- > 0) {
      if (++pos[j] < lists.n[j]) break;
      pos[j] = 0;
    }
    if (j == static_cast<std::size_t>(-1)) return;
  }
}

CoordLists masked_lists(const GridIndex& index, const CellCoord& c) {
  const AdjacentRanges o = adjacent_ranges(index.geometry(), c);
  CoordLists out;
  out.dims = index.dims();
  for (std::size_t j = 0; j < out.dims; ++j) {
    const auto m = index.mask(j);
    auto it = std::lower_bound(m.begin(), m.end(), o[j].lo);
    for (; it != m.end() && *it <= o[j].hi; ++it) out.v[j][out.n[j]++] = *it;
  }
  return out;
}

/// Lists for unicomp block `j`: free below j, masked minus home in j, fixed
/// above j.
CoordLists unicomp_block(const CoordLists& masked, const CellCoord& c, std::size_t j) {
  CoordLists out = masked;
  out.n[j] = 0;
  for (std::uint8_t k = 0; k < masked.n[j]; ++k) {
    if (masked.v[j][k] != c[j]) out.v[j][out.n[j]++] = masked.v[j][k];
  }
  for (std::size_t i = j + 1; i < c.dims; ++i) {
    out.v[i][0] = c[i];
    out.n[i] = 1;
  }
  return out;
}

class QueryProcessor {
 public:
  QueryProcessor(const Dataset& d, const GridIndex& index, const simd::Kernels& kernels,
                 JoinMode mode, bool include_self)
      : data_(d),
        index_(index),
        kernels_(kernels),
        mode_(mode),
        include_self_(include_self),
        eps2_(index.eps() * index.eps()) {
    LinearId stride = 1;
    for (std::size_t j = 0; j < index.dims(); ++j) {
      strides_[j] = stride;
      stride *= static_cast<LinearId>(index.geometry().cells_per_dim[j]);
    }
    std::size_t largest = 0;
    for (const GridCell& cell : index.cells()) largest = std::max(largest, cell.count());
    hits_.resize(largest);
  }

  /// emit(key, value) is called once per emitted pair.
  template <class Emit>
  void run(PointId p, Emit&& emit, JoinStats& st, ProbeTrace* trace = nullptr) {
    const std::span<const double> q = data_.point(p);
    const CellCoord home = cell_coord(index_.geometry(), q);
    const CoordLists masked = masked_lists(index_, home);
    if (trace) {
      trace->home = home;
      trace->adjacent = adjacent_ranges(index_.geometry(), home);
      trace->masked.dims = masked.dims;
      for (std::size_t j = 0; j < masked.dims; ++j) {
        trace->masked.coords[j].assign(masked.v[j].begin(), masked.v[j].begin() + masked.n[j]);
      }
    }

    if (mode_ == JoinMode::baseline) {
      for_each_tuple(masked, [&](const CellCoord& c) { scan(p, q, c, false, emit, st, trace); });
      return;
    }

    scan(p, q, home, false, emit, st, trace);
    for (std::size_t j = 0; j < home.dims; ++j) {
      if ((home[j] & 1) == 0) continue;
      for_each_tuple(unicomp_block(masked, home, j),
                     [&](const CellCoord& c) { scan(p, q, c, true, emit, st, trace); });
    }
  }

 private:
  template <class Emit>
  void scan(PointId p, std::span<const double> q, const CellCoord& c, bool mirror, Emit& emit,
            JoinStats& st, ProbeTrace* trace) {
    LinearId id = 0;
    for (std::size_t j = 0; j < c.dims; ++j) id += static_cast<LinearId>(c[j]) * strides_[j];
    ++st.cells_probed;
    if (trace) trace->probed.push_back(id);
    const auto pos = index_.find(id);
    if (!pos) return;
    if (trace) trace->found.push_back(id);

    const GridCell& cell = index_.cells()[*pos];
    st.candidates_tested += cell.count();
    const std::size_t n =
        kernels_.filter(q.data(), {index_.columns(), index_.dims()}, cell.a_min,
                        std::size_t{cell.a_max} + 1, eps2_, hits_.data());
    const auto lookup = index_.lookup();
    for (std::size_t h = 0; h < n; ++h) {
      const PointId v = lookup[hits_[h]];
      if (v == p && !include_self_) continue;
      if (trace) trace->neighbors.push_back(v);
      emit(p, v);
      ++st.pairs_emitted;
      if (mirror) {
        emit(v, p);
        ++st.pairs_emitted;
      }
    }
  }

  const Dataset& data_;
  const GridIndex& index_;
  const simd::Kernels& kernels_;
  JoinMode mode_;
  bool include_self_;
  double eps2_;
  std::array<LinearId, kMaxJoinDims> strides_{};
  std::vector<std::uint32_t> hits_;
};

void check_inputs(const Dataset& d, const GridIndex& index, const JoinConfig& cfg) {
  cfg.validate();
  if (cfg.eps != index.eps()) {
    throw JoinError("config eps " + std::to_string(cfg.eps) + " does not match index eps " +
                    std::to_string(index.eps()));
  }
  if (d.dims() != index.dims() || d.size() != index.lookup().size()) {
    throw JoinError("index was not built from this dataset");
  }
}

const simd::Kernels& kernels_for(const JoinConfig& cfg) {
  return cfg.simd ? simd::kernels(*cfg.simd) : simd::best_kernels();
}

/// Runs body(worker, begin, end) over `workers` contiguous chunks of
/// [begin, end), on separate threads when there is more than one chunk.
void parallel_chunks(std::size_t workers, PointId begin, PointId end,
                     const std::function<void(std::size_t, PointId, PointId)>& body) {
  const std::size_t total = end - begin;
  const std::size_t chunks = std::max<std::size_t>(1, std::min(workers, total));
  auto bound = [&](std::size_t i) { return static_cast<PointId>(begin + total * i / chunks); };
  if (chunks == 1) {
    body(0, begin, end);
    return;
  }
  std::vector<std::exception_ptr> errors(chunks);
  {
    std::vector<std::jthread> threads;
    threads.reserve(chunks);
    for (std::size_t i = 0; i < chunks; ++i) {
      threads.emplace_back([&, i] {
        try {
          body(i, bound(i), bound(i + 1));
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::string_view to_string(JoinMode mode) {
  return mode == JoinMode::baseline ? "baseline" : "unicomp";
}

std::optional<JoinMode> parse_mode(std::string_view name) {
  if (name == "baseline") return JoinMode::baseline;
  if (name == "unicomp") return JoinMode::unicomp;
  return std::nullopt;
}

void JoinConfig::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw JoinError("eps must be positive and finite");
  if (buffer_capacity < 1) throw JoinError("buffer_capacity must be at least 1");
  if (min_batches < 1) throw JoinError("min_batches must be at least 1");
  if (workers < 1) throw JoinError("workers must be at least 1");
}

std::vector<ResultPair> MemorySink::concatenated() const {
  std::vector<ResultPair> out;
  for (const auto& b : batches_) out.insert(out.end(), b.pairs.begin(), b.pairs.end());
  return out;
}

std::vector<ResultPair> MemorySink::sorted_pairs() const {
  auto out = concatenated();
  std::sort(out.begin(), out.end());
  return out;
}

PairFileSink::PairFileSink(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw JoinError("cannot open " + path.string() + " for writing");
}

void PairFileSink::consume(const ResultBatch& batch) {
  write_pairs(out_, batch.pairs);
  if (!out_) throw JoinError("write failed: " + path_.string());
}

void PairFileSink::close() {
  out_.close();
  if (!out_) throw JoinError("close failed: " + path_.string());
}

void write_pairs(std::ostream& os, const std::vector<ResultPair>& pairs) {
  std::string buf;
  buf.reserve(pairs.size() * 16);
  for (const ResultPair& r : pairs) {
    buf += std::to_string(r.key);
    buf += ',';
    buf += std::to_string(r.value);
    buf += '\n';
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::size_t batch_count_for(double estimated_pairs, std::size_t capacity, std::size_t min_batches) {
  const double needed = std::ceil(std::max(0.0, estimated_pairs) / static_cast<double>(capacity));
  return std::max(min_batches, static_cast<std::size_t>(needed));
}

BatchPlan plan_batches(const Dataset& d, const GridIndex& index, const JoinConfig& cfg) {
  check_inputs(d, index, cfg);
  const std::size_t total = d.size();
  const std::size_t sample = std::min(total, std::max<std::size_t>((total + 99) / 100, 1000));

  // Pairs keyed by each sampled query: its neighbor count in baseline order.
  QueryProcessor proc(d, index, kernels_for(cfg), JoinMode::baseline, cfg.include_self_pairs);
  std::vector<PointId> sample_ids(sample);
  std::vector<double> sample_counts(sample);
  double sum = 0.0;
  for (std::size_t i = 0; i < sample; ++i) {
    sample_ids[i] = static_cast<PointId>(i * total / sample);
    std::uint64_t count = 0;
    JoinStats ignored;
    proc.run(sample_ids[i], [&](PointId, PointId) { ++count; }, ignored);
    sample_counts[i] = static_cast<double>(count);
    sum += sample_counts[i];
  }
  const double mean = sum / static_cast<double>(sample);

  auto estimate = [&](PointId begin, PointId end) {
    const auto lo = std::lower_bound(sample_ids.begin(), sample_ids.end(), begin);
    const auto hi = std::lower_bound(lo, sample_ids.end(), end);
    double m = mean;
    if (hi != lo) {
      double s = 0.0;
      for (auto it = lo; it != hi; ++it) s += sample_counts[it - sample_ids.begin()];
      m = s / static_cast<double>(hi - lo);
    }
    return m * static_cast<double>(end - begin);
  };

  BatchPlan plan;
  plan.sample_size = sample;
  plan.estimated_total = mean * static_cast<double>(total);
  const std::size_t k = batch_count_for(plan.estimated_total, cfg.buffer_capacity, cfg.min_batches);
  const double limit = 2.0 * static_cast<double>(cfg.buffer_capacity);

  std::vector<QueryRange> pending;
  for (std::size_t i = k; i-- > 0;) {
    const auto b = static_cast<PointId>(total * i / k);
    const auto e = static_cast<PointId>(total * (i + 1) / k);
    pending.push_back({b, e, estimate(b, e)});
  }
  while (!pending.empty()) {
    const QueryRange r = pending.back();
    pending.pop_back();
    if (r.estimated_pairs > limit && r.end - r.begin > 1) {
      const PointId mid = r.begin + (r.end - r.begin) / 2;
      pending.push_back({mid, r.end, estimate(mid, r.end)});
      pending.push_back({r.begin, mid, estimate(r.begin, mid)});
      continue;
    }
    plan.ranges.push_back(r);
  }
  return plan;
}

JoinStats self_join(const Dataset& d, const GridIndex& index, const JoinConfig& cfg, ResultSink& sink) {
  check_inputs(d, index, cfg);
  const simd::Kernels& kernels = kernels_for(cfg);
  const BatchPlan plan = plan_batches(d, index, cfg);

  JoinStats total;
  std::vector<std::vector<ResultPair>> local(cfg.workers);
  std::vector<JoinStats> local_stats(cfg.workers);
  for (std::size_t b = 0; b < plan.ranges.size(); ++b) {
    const QueryRange& range = plan.ranges[b];
    for (auto& v : local) v.clear();
    std::fill(local_stats.begin(), local_stats.end(), JoinStats{});

    parallel_chunks(cfg.workers, range.begin, range.end, [&](std::size_t w, PointId lo, PointId hi) {
      QueryProcessor proc(d, index, kernels, cfg.mode, cfg.include_self_pairs);
      auto& out = local[w];
      auto emit = [&out](PointId key, PointId value) { out.push_back({key, value}); };
      for (PointId p = lo; p < hi; ++p) proc.run(p, emit, local_stats[w]);
    });

    ResultBatch batch;
    batch.batch_index = b;
    std::size_t size = 0;
    for (const auto& v : local) size += v.size();
    batch.pairs.reserve(size);
    for (std::size_t w = 0; w < cfg.workers; ++w) {
      batch.pairs.insert(batch.pairs.end(), local[w].begin(), local[w].end());
      total += local_stats[w];
    }
    std::sort(batch.pairs.begin(), batch.pairs.end());
    ++total.batches;
    try {
      sink.consume(batch);
    } catch (const std::exception& e) {
      throw JoinError("sink failed on batch " + std::to_string(b) + ": " + e.what());
    }
  }
  return total;
}

CountResult count_only_join(const Dataset& d, const GridIndex& index, const JoinConfig& cfg) {
  check_inputs(d, index, cfg);
  const simd::Kernels& kernels = kernels_for(cfg);
  std::vector<JoinStats> local_stats(cfg.workers);
  parallel_chunks(cfg.workers, 0, static_cast<PointId>(d.size()),
                  [&](std::size_t w, PointId lo, PointId hi) {
                    QueryProcessor proc(d, index, kernels, cfg.mode, cfg.include_self_pairs);
                    for (PointId p = lo; p < hi; ++p) proc.run(p, [](PointId, PointId) {}, local_stats[w]);
                  });
  CountResult result;
  for (const auto& s : local_stats) result.stats += s;
  result.total_pairs = result.stats.pairs_emitted;
  return result;
}

std::vector<CellCoord> unicomp_cells(const CellCoord& c, const MaskedRanges& masked) {
  CoordLists lists;
  lists.dims = c.dims;
  for (std::size_t j = 0; j < c.dims; ++j) {
    if (masked.coords[j].size() > 3) throw JoinError("masked range wider than 3 cells");
    for (auto v : masked.coords[j]) lists.v[j][lists.n[j]++] = v;
  }
  std::vector<CellCoord> out;
  for (std::size_t j = 0; j < c.dims; ++j) {
    if ((c[j] & 1) == 0) continue;
    for_each_tuple(unicomp_block(lists, c, j), [&](const CellCoord& cell) { out.push_back(cell); });
  }
  return out;
}

ProbeTrace trace_query(const Dataset& d, const GridIndex& index, PointId query, JoinMode mode,
                       bool include_self_pairs) {
  if (query >= d.size()) throw JoinError("query id out of range");
  QueryProcessor proc(d, index, simd::kernels(simd::Level::scalar), mode, include_self_pairs);
  ProbeTrace trace;
  JoinStats ignored;
  proc.run(query, [](PointId, PointId) {}, ignored, &trace);
  return trace;
}

}  // namespace simjoin
