// SPDX-License-Identifier: Apache-2.0

#include "simjoin/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace simjoin {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string row_error(std::size_t row, const std::string& what) {
  return "row " + std::to_string(row) + ": " + what;
}

}  // namespace

Dataset::Dataset(std::size_t dims, std::vector<double> coords)
    : dims_(dims), coords_(std::move(coords)) {
  if (dims_ == 0) throw DatasetError("dimensionality must be positive");
  if (coords_.size() % dims_ != 0) {
    throw DatasetError("coordinate count " + std::to_string(coords_.size()) +
                       " is not a multiple of dimensionality " + std::to_string(dims_));
  }
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (!std::isfinite(coords_[i])) {
      throw DatasetError("point " + std::to_string(i / dims_) + " has a non-finite coordinate");
    }
  }
}

Dataset Dataset::from_points(const std::vector<Point>& points) {
  if (points.empty()) throw DatasetError("no points");
  const std::size_t dims = points.front().coords.size();
  std::vector<double> flat;
  flat.reserve(points.size() * dims);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].coords.size() != dims) {
      throw DatasetError("point " + std::to_string(i) + " has " +
                         std::to_string(points[i].coords.size()) + " coordinates, expected " +
                         std::to_string(dims));
    }
    flat.insert(flat.end(), points[i].coords.begin(), points[i].coords.end());
  }
  return Dataset(dims, std::move(flat));
}

Dataset parse_csv(std::string_view text, std::size_t dims, CsvOptions opts) {
  if (dims == 0) throw DatasetError("dimensionality must be positive");
  std::vector<double> coords;
  std::size_t row = 0;
  bool header_pending = opts.skip_header;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++row;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    line = trim(line);
    if (line.empty()) continue;

    std::size_t fields = 0;
    while (true) {
      const auto comma = line.find(',');
      const std::string_view field = trim(line.substr(0, comma));
      if (fields == dims) {
        throw DatasetError(row_error(row, "expected " + std::to_string(dims) + " fields, got more"));
      }
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw DatasetError(row_error(row, "field " + std::to_string(fields + 1) + " '" +
                                              std::string(field) + "' is not a number"));
      }
      if (!std::isfinite(v)) {
        throw DatasetError(row_error(row, "field " + std::to_string(fields + 1) + " is not finite"));
      }
      coords.push_back(v);
      ++fields;
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (fields != dims) {
      throw DatasetError(row_error(row, "expected " + std::to_string(dims) + " fields, got " +
                                            std::to_string(fields)));
    }
  }
  if (coords.empty()) throw DatasetError("no data rows");
  return Dataset(dims, std::move(coords));
}

Dataset load_csv(const std::filesystem::path& path, std::size_t dims, CsvOptions opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str(), dims, opts);
  } catch (const DatasetError& e) {
    throw DatasetError(path.string() + ": " + e.what());
  }
}

std::string format_csv(const Dataset& d) {
  std::string out;
  out.reserve(d.size() * d.dims() * 12);
  char buf[64];
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.dims(); ++j) {
      if (j) out.push_back(',');
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d.coord(i, j));
      out.append(buf, ptr);
    }
    out.push_back('\n');
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const Dataset& d) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError("cannot open " + path.string() + " for writing");
  const std::string text = format_csv(d);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DatasetError("write failed: " + path.string());
}

Dataset generate_uniform(std::size_t count, std::size_t dims, double lo, double hi,
                         std::uint64_t seed) {
  if (count == 0) throw DatasetError("count must be positive");
  if (dims == 0) throw DatasetError("dimensionality must be positive");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw DatasetError("require finite lo < hi");
  }
  std::mt19937_64 engine(seed);
  const double span = hi - lo;
  constexpr double kUnit = 0x1.0p-53;
  std::vector<double> coords(count * dims);
  for (double& x : coords) {
    const double u = static_cast<double>(engine() >> 11) * kUnit;
    x = std::min(hi, lo + span * u);
  }
  return Dataset(dims, std::move(coords));
}

Dataset normalize_unit(const Dataset& d) {
  const std::size_t n = d.dims();
  std::vector<double> lo(n, std::numeric_limits<double>::infinity());
  std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      lo[j] = std::min(lo[j], d.coord(i, j));
      hi[j] = std::max(hi[j], d.coord(i, j));
    }
  }
  std::vector<double> out(d.raw().begin(), d.raw().end());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double& x = out[i * n + j];
      x = hi[j] > lo[j] ? std::clamp((x - lo[j]) / (hi[j] - lo[j]), 0.0, 1.0) : 0.0;
    }
  }
  return Dataset(n, std::move(out));
}

}  // namespace simjoin
