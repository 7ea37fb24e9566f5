// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "simjoin/dataset.hpp"

namespace simjoin {
namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("simjoin_dataset_" + name);
}

TEST(CsvTest, ParsesRowsInOrder) {
  const Dataset d = parse_csv("0,0\n3,4\n", 2);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.coord(1, 0), 3.0);
  EXPECT_EQ(d.coord(1, 1), 4.0);
}

TEST(CsvTest, ArityErrorNamesRow) {
  try {
    parse_csv("1,2,3\n", 2);
    FAIL() << "expected arity error";
  } catch (const DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_csv("1,2\n3\n", 2), DatasetError);
}

TEST(CsvTest, RejectsNonNumericAndNonFinite) {
  try {
    parse_csv("1,2\n1,x\n", 2);
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_csv("1,nan\n", 2), DatasetError);
  EXPECT_THROW(parse_csv("inf,1\n", 2), DatasetError);
  EXPECT_THROW(parse_csv("1,\n", 2), DatasetError);
}

TEST(CsvTest, EmptyInputIsAnError) {
  EXPECT_THROW(parse_csv("", 2), DatasetError);
  EXPECT_THROW(parse_csv("x,y\n", 2, {.skip_header = true}), DatasetError);
}

TEST(CsvTest, HeaderSkipAndCrlf) {
  const Dataset d = parse_csv("x,y\r\n1.5,2\r\n", 2, {.skip_header = true});
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.coord(0, 0), 1.5);
}

TEST(CsvTest, MissingFile) {
  EXPECT_THROW(load_csv("/nonexistent/points.csv", 2), DatasetError);
}

// Round trip is exact, including awkward values.
TEST(CsvTest, WriteLoadRoundTripIsBitExact) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  std::vector<double> coords;
  for (int i = 0; i < 3000; ++i) coords.push_back(u(rng));
  coords.push_back(0.1);
  coords.push_back(-0.0);
  coords.push_back(std::numeric_limits<double>::denorm_min());
  coords.push_back(std::numeric_limits<double>::max());
  coords.push_back(1.0 / 3.0);
  coords.push_back(5e-324);
  const Dataset d(3, coords);
  const auto path = temp_file("roundtrip.csv");
  write_csv(path, d);
  const Dataset back = load_csv(path, 3);
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back.raw()[i]), std::bit_cast<std::uint64_t>(coords[i]));
  }
  std::filesystem::remove(path);
}

TEST(DatasetTest, RejectsMixedArityAndNonFinite) {
  EXPECT_THROW(Dataset::from_points({{{1, 2}}, {{1, 2, 3}}}), DatasetError);
  EXPECT_THROW(Dataset(2, {1.0, std::numeric_limits<double>::quiet_NaN()}), DatasetError);
  EXPECT_THROW(Dataset(2, {1.0, 2.0, 3.0}), DatasetError);
}

TEST(GenerateTest, DeterministicForSeed) {
  EXPECT_EQ(generate_uniform(10, 3, 0, 100, 42), generate_uniform(10, 3, 0, 100, 42));
  EXPECT_NE(generate_uniform(10, 3, 0, 100, 42), generate_uniform(10, 3, 0, 100, 43));
}

// Pins the documented RNG mapping: top 53 bits of mt19937_64 scaled to [lo, hi].
TEST(GenerateTest, DocumentedStream) {
  std::mt19937_64 engine(7);
  const Dataset d = generate_uniform(4, 2, -5, 5, 7);
  for (double x : d.raw()) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    EXPECT_EQ(x, -5 + 10 * u);
  }
}

TEST(GenerateTest, UniformMoments) {
  const std::size_t count = 100000;
  const Dataset d = generate_uniform(count, 2, 0, 100, 5);
  const double tolerance = 100.0 / std::sqrt(static_cast<double>(count)) * 5.0;
  for (std::size_t j = 0; j < 2; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double x = d.coord(i, j);
      ASSERT_GE(x, 0.0);
      ASSERT_LE(x, 100.0);
      sum += x;
    }
    EXPECT_NEAR(sum / count, 50.0, tolerance);
  }
}

TEST(GenerateTest, RejectsBadBounds) {
  EXPECT_THROW(generate_uniform(10, 2, 100, 0, 1), DatasetError);
  EXPECT_THROW(generate_uniform(10, 2, 1, 1, 1), DatasetError);
  EXPECT_THROW(generate_uniform(0, 2, 0, 1, 1), DatasetError);
}

TEST(NormalizeTest, Endpoints) {
  const Dataset d = normalize_unit(Dataset(2, {0, 0, 10, 100}));
  EXPECT_EQ(d, Dataset(2, {0, 0, 1, 1}));
}

TEST(NormalizeTest, DegenerateDimensionMapsToZero) {
  EXPECT_EQ(normalize_unit(Dataset(2, {5, 5})), Dataset(2, {0, 0}));
}

TEST(NormalizeTest, LinearMap) {
  EXPECT_EQ(normalize_unit(Dataset(1, {0, 2, 4})), Dataset(1, {0, 0.5, 1}));
}

TEST(NormalizeTest, OutputInUnitCubeAndOrderPreserved) {
  const Dataset d = generate_uniform(2000, 4, -30, 70, 3);
  const Dataset n = normalize_unit(d);
  ASSERT_EQ(n.size(), d.size());
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      ASSERT_GE(n.coord(i, j), 0.0);
      ASSERT_LE(n.coord(i, j), 1.0);
    }
    // Monotone per dimension.
    for (std::size_t i = 1; i < d.size(); ++i) {
      if (d.coord(i - 1, j) < d.coord(i, j)) {
        ASSERT_LE(n.coord(i - 1, j), n.coord(i, j));
      }
      if (d.coord(i - 1, j) > d.coord(i, j)) {
        ASSERT_GE(n.coord(i - 1, j), n.coord(i, j));
      }
    }
  }
}

}  // namespace
}  // namespace simjoin
