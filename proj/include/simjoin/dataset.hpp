// SPDX-License-Identifier: Apache-2.0
//
// Point storage for the self-join: ingestion, synthetic generation and
// normalization.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace simjoin {

/// Points are addressed by their 0-based position in the dataset.
using PointId = std::uint32_t;

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Owning point value, used at API boundaries. Datasets store points flat.
struct Point {
  std::vector<double> coords;
};

/// Immutable collection of n-dimensional points stored row-major.
class Dataset {
 public:
  Dataset() = default;

  /// Takes ownership of `coords`, which must hold a multiple of `dims`
  /// finite values.
  Dataset(std::size_t dims, std::vector<double> coords);

  static Dataset from_points(const std::vector<Point>& points);

  std::size_t dims() const { return dims_; }
  std::size_t size() const { return dims_ == 0 ? 0 : coords_.size() / dims_; }
  bool empty() const { return size() == 0; }

  std::span<const double> point(std::size_t id) const {
    return {coords_.data() + id * dims_, dims_};
  }
  double coord(std::size_t id, std::size_t dim) const { return coords_[id * dims_ + dim]; }

  /// Row-major coordinate buffer, size() * dims() values.
  std::span<const double> raw() const { return coords_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t dims_ = 0;
  std::vector<double> coords_;
};

struct CsvOptions {
  bool skip_header = false;
};

/// Reads one point per line, `dims` comma-separated decimal fields. Row
/// numbers in error messages are 1-based file lines.
Dataset load_csv(const std::filesystem::path& path, std::size_t dims, CsvOptions opts = {});
Dataset parse_csv(std::string_view text, std::size_t dims, CsvOptions opts = {});

/// Writes shortest round-trip decimal representations, so load_csv recovers
/// every coordinate bit-for-bit.
void write_csv(const std::filesystem::path& path, const Dataset& d);
std::string format_csv(const Dataset& d);

/// Uniform points in [lo, hi]^dims drawn from std::mt19937_64(seed). Each
/// coordinate takes the top 53 bits of one engine output u and maps them to
/// lo + (hi - lo) * (u >> 11) * 2^-53, so the stream is fixed across
/// standard libraries.
Dataset generate_uniform(std::size_t count, std::size_t dims, double lo, double hi,
                         std::uint64_t seed);

/// Per-dimension min-max scaling to [0, 1]. A dimension whose values are all
/// equal maps to 0.
Dataset normalize_unit(const Dataset& d);

}  // namespace simjoin
