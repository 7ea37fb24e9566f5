// SPDX-License-Identifier: Apache-2.0

#include "simjoin/grid_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace simjoin {

GridGeometry GridGeometry::for_dataset(const Dataset& d, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw IndexError("eps must be positive and finite");
  }
  if (d.empty()) throw IndexError("cannot index an empty dataset");
  if (d.dims() < kMinJoinDims || d.dims() > kMaxJoinDims) {
    throw IndexError("dimensionality " + std::to_string(d.dims()) + " outside supported range [" +
                     std::to_string(kMinJoinDims) + ", " + std::to_string(kMaxJoinDims) + "]");
  }
  if (d.size() > std::numeric_limits<PointId>::max()) {
    throw IndexError("dataset too large for 32-bit point ids");
  }

  GridGeometry g;
  g.dims = d.dims();
  g.eps = eps;
  for (std::size_t j = 0; j < g.dims; ++j) {
    double lo = d.coord(0, j);
    double hi = lo;
    for (std::size_t i = 1; i < d.size(); ++i) {
      lo = std::min(lo, d.coord(i, j));
      hi = std::max(hi, d.coord(i, j));
    }
    g.g_min[j] = lo - eps;
    g.g_max[j] = hi + eps;
    const double cells = std::ceil((g.g_max[j] - g.g_min[j]) / eps);
    // 2^62 keeps c +/- 1 arithmetic well inside int64.
    if (!(cells < 0x1.0p62)) {
      throw IndexError("grid too fine in dimension " + std::to_string(j) + "; use a larger eps");
    }
    g.cells_per_dim[j] = std::max<std::int64_t>(3, static_cast<std::int64_t>(cells));
  }

  std::uint64_t capacity = 1;
  for (std::size_t j = 0; j < g.dims; ++j) {
    if (__builtin_mul_overflow(capacity, static_cast<std::uint64_t>(g.cells_per_dim[j]), &capacity)) {
      throw IndexError("cell count exceeds 64-bit linear ids; use a larger eps");
    }
  }
  return g;
}

CellCoord cell_coord(const GridGeometry& g, std::span<const double> p) {
  CellCoord c;
  c.dims = g.dims;
  for (std::size_t j = 0; j < g.dims; ++j) {
    const double f = std::floor((p[j] - g.g_min[j]) / g.eps);
    const double top = static_cast<double>(g.cells_per_dim[j] - 1);
    c[j] = static_cast<std::int64_t>(std::clamp(f, 0.0, top));
  }
  return c;
}

LinearId linearize(const GridGeometry& g, const CellCoord& c) {
  LinearId id = 0;
  for (std::size_t j = g.dims; j-- > 0;) {
    if (c[j] < 0 || c[j] >= g.cells_per_dim[j]) {
      throw IndexError("cell coordinate " + std::to_string(c[j]) + " out of range in dimension " +
                       std::to_string(j));
    }
    id = id * static_cast<LinearId>(g.cells_per_dim[j]) + static_cast<LinearId>(c[j]);
  }
  return id;
}

CellCoord delinearize(const GridGeometry& g, LinearId id) {
  CellCoord c;
  c.dims = g.dims;
  for (std::size_t j = 0; j < g.dims; ++j) {
    const auto w = static_cast<LinearId>(g.cells_per_dim[j]);
    c[j] = static_cast<std::int64_t>(id % w);
    id /= w;
  }
  if (id != 0) throw IndexError("linear id out of range");
  return c;
}

AdjacentRanges adjacent_ranges(const GridGeometry& g, const CellCoord& c) {
  AdjacentRanges o{};
  for (std::size_t j = 0; j < g.dims; ++j) {
    o[j] = {std::max<std::int64_t>(0, c[j] - 1), std::min(g.cells_per_dim[j] - 1, c[j] + 1)};
  }
  return o;
}

GridIndex GridIndex::build(const Dataset& d, double eps) {
  GridIndex index;
  index.geometry_ = GridGeometry::for_dataset(d, eps);
  const GridGeometry& g = index.geometry_;
  const std::size_t count = d.size();

  std::vector<std::pair<LinearId, PointId>> keyed(count);
  for (std::size_t i = 0; i < count; ++i) {
    keyed[i] = {linearize(g, cell_coord(g, d.point(i))), static_cast<PointId>(i)};
  }
  std::sort(keyed.begin(), keyed.end());

  index.lookup_.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    index.lookup_[k] = keyed[k].second;
    if (k == 0 || keyed[k].first != keyed[k - 1].first) {
      index.cell_ids_.push_back(keyed[k].first);
      index.cells_.push_back({keyed[k].first, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k)});
    } else {
      index.cells_.back().a_max = static_cast<std::uint32_t>(k);
    }
  }

  for (std::size_t j = 0; j < g.dims; ++j) {
    auto& m = index.masks_[j];
    m.reserve(index.cells_.size());
    for (const GridCell& cell : index.cells_) m.push_back(delinearize(g, cell.linear_id)[j]);
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());

    auto& col = index.sorted_coords_[j];
    col.resize(count);
    for (std::size_t k = 0; k < count; ++k) col[k] = d.coord(index.lookup_[k], j);
  }
  index.bind_columns();
  return index;
}

GridIndex& GridIndex::operator=(const GridIndex& other) {
  if (this != &other) {
    geometry_ = other.geometry_;
    cell_ids_ = other.cell_ids_;
    cells_ = other.cells_;
    lookup_ = other.lookup_;
    masks_ = other.masks_;
    sorted_coords_ = other.sorted_coords_;
    bind_columns();
  }
  return *this;
}

void GridIndex::bind_columns() {
  for (std::size_t j = 0; j < kMaxJoinDims; ++j) column_ptrs_[j] = sorted_coords_[j].data();
}

std::optional<std::size_t> GridIndex::find(LinearId id) const {
  const auto it = std::lower_bound(cell_ids_.begin(), cell_ids_.end(), id);
  if (it == cell_ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - cell_ids_.begin());
}

std::optional<GridCell> GridIndex::lookup_cell(LinearId id) const {
  if (auto pos = find(id)) return cells_[*pos];
  return std::nullopt;
}

MaskedRanges GridIndex::mask_ranges(const AdjacentRanges& o) const {
  MaskedRanges out;
  out.dims = geometry_.dims;
  for (std::size_t j = 0; j < geometry_.dims; ++j) {
    const auto& m = masks_[j];
    const auto first = std::lower_bound(m.begin(), m.end(), o[j].lo);
    const auto last = std::upper_bound(first, m.end(), o[j].hi);
    out.coords[j].assign(first, last);
  }
  return out;
}

std::string GridIndex::debug_dump() const {
  std::ostringstream os;
  os << "dims " << geometry_.dims << " eps " << geometry_.eps << " cells";
  for (std::size_t j = 0; j < geometry_.dims; ++j) os << ' ' << geometry_.cells_per_dim[j];
  os << "\nB";
  for (std::size_t h = 0; h < cells_.size(); ++h) os << ' ' << cell_ids_[h] << ':' << cells_[h].count();
  for (std::size_t j = 0; j < geometry_.dims; ++j) {
    os << "\nM" << j;
    for (auto v : masks_[j]) os << ' ' << v;
  }
  os << '\n';
  return os.str();
}

}  // namespace simjoin
