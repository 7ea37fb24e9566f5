// SPDX-License-Identifier: Apache-2.0
//
// Sparse epsilon grid. Space is padded by eps on every side and cut into
// eps-length cells; only non-empty cells are stored:
//
//   B  sorted linear ids of non-empty cells (binary-searched)
//   G  one record per non-empty cell, parallel to B, holding a range of A
//   A  point ids grouped by cell, |A| = |D|
//   M  per dimension, the sorted set of occupied cell coordinates
//
// Linear ids put dimension 0 on the fastest-varying axis:
//   id = c[0] + cells[0] * (c[1] + cells[1] * (c[2] + ...))

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "simjoin/dataset.hpp"

namespace simjoin {

inline constexpr std::size_t kMinJoinDims = 2;
inline constexpr std::size_t kMaxJoinDims = 6;

using LinearId = std::uint64_t;

class IndexError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridGeometry {
  std::size_t dims = 0;
  double eps = 0.0;
  std::array<double, kMaxJoinDims> g_min{};
  std::array<double, kMaxJoinDims> g_max{};
  std::array<std::int64_t, kMaxJoinDims> cells_per_dim{};

  /// Computes padded extents and cell counts for `d`. Throws IndexError on a
  /// bad eps, unsupported dimensionality, or when the cell count overflows
  /// 64-bit linear ids.
  static GridGeometry for_dataset(const Dataset& d, double eps);
};

struct CellCoord {
  std::array<std::int64_t, kMaxJoinDims> c{};
  std::size_t dims = 0;

  std::int64_t operator[](std::size_t j) const { return c[j]; }
  std::int64_t& operator[](std::size_t j) { return c[j]; }
  friend bool operator==(const CellCoord& a, const CellCoord& b) {
    for (std::size_t j = 0; j < a.dims; ++j) {
      if (a.c[j] != b.c[j]) return false;
    }
    return a.dims == b.dims;
  }
};

/// Inclusive coordinate range in one dimension.
struct CoordRange {
  std::int64_t lo;
  std::int64_t hi;
  friend bool operator==(const CoordRange&, const CoordRange&) = default;
};

using AdjacentRanges = std::array<CoordRange, kMaxJoinDims>;

/// Occupied coordinates per dimension after masking; each list ascending.
struct MaskedRanges {
  std::array<std::vector<std::int64_t>, kMaxJoinDims> coords;
  std::size_t dims = 0;

  bool any_empty() const {
    for (std::size_t j = 0; j < dims; ++j) {
      if (coords[j].empty()) return true;
    }
    return false;
  }
};

struct GridCell {
  LinearId linear_id;
  std::uint32_t a_min;  ///< inclusive
  std::uint32_t a_max;  ///< inclusive

  std::size_t count() const { return std::size_t{a_max} - a_min + 1; }
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

CellCoord cell_coord(const GridGeometry& g, std::span<const double> p);
LinearId linearize(const GridGeometry& g, const CellCoord& c);
CellCoord delinearize(const GridGeometry& g, LinearId id);
AdjacentRanges adjacent_ranges(const GridGeometry& g, const CellCoord& c);

class GridIndex {
 public:
  static GridIndex build(const Dataset& d, double eps);

  const GridGeometry& geometry() const { return geometry_; }
  std::size_t dims() const { return geometry_.dims; }
  double eps() const { return geometry_.eps; }

  std::span<const LinearId> cell_ids() const { return cell_ids_; }        // B
  std::span<const GridCell> cells() const { return cells_; }              // G
  std::span<const PointId> lookup() const { return lookup_; }             // A
  std::span<const std::int64_t> mask(std::size_t dim) const { return masks_[dim]; }  // M

  /// Binary search of B. Returns the position in G.
  std::optional<std::size_t> find(LinearId id) const;
  std::optional<GridCell> lookup_cell(LinearId id) const;

  /// Point ids stored in cell `cell_pos` (position in G), in A order.
  std::span<const PointId> points_in(std::size_t cell_pos) const {
    const GridCell& c = cells_[cell_pos];
    return {lookup_.data() + c.a_min, c.count()};
  }

  MaskedRanges mask_ranges(const AdjacentRanges& o) const;

  /// Coordinates of the points reordered to A order, one column per
  /// dimension, for the distance kernels.
  const double* const* columns() const { return column_ptrs_.data(); }

  /// Text dump of B, per-cell counts and M.
  std::string debug_dump() const;

  GridIndex(const GridIndex& other) { *this = other; }
  GridIndex& operator=(const GridIndex& other);
  GridIndex(GridIndex&&) noexcept = default;
  GridIndex& operator=(GridIndex&&) noexcept = default;

 private:
  GridIndex() = default;
  void bind_columns();

  GridGeometry geometry_;
  std::vector<LinearId> cell_ids_;
  std::vector<GridCell> cells_;
  std::vector<PointId> lookup_;
  std::array<std::vector<std::int64_t>, kMaxJoinDims> masks_;
  std::array<std::vector<double>, kMaxJoinDims> sorted_coords_;
  std::array<const double*, kMaxJoinDims> column_ptrs_{};
};

inline GridIndex build_index(const Dataset& d, double eps) { return GridIndex::build(d, eps); }

}  // namespace simjoin
