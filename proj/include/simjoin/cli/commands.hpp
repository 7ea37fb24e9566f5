// SPDX-License-Identifier: Apache-2.0
//
// Implementation of the simjoin command-line subcommands. Each command
// writes its report to the given stream and returns a process exit code.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "simjoin/dataset.hpp"
#include "simjoin/join_engine.hpp"

namespace simjoin::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One measured join. Report columns, in order:
/// dataset,label,D,n,eps,mode,workers,build_s,join_s,cells_probed,
/// candidates_tested,pairs,mean_neighbors,batches
struct RunReport {
  std::string dataset;
  std::string label;
  std::uint64_t points = 0;
  std::size_t dims = 0;
  double eps = 0.0;
  JoinMode mode = JoinMode::baseline;
  std::size_t workers = 1;
  double build_s = 0.0;  ///< grid construction
  double join_s = 0.0;   ///< join only, excludes parsing and build
  JoinStats stats;
  std::uint64_t pairs = 0;
  double mean_neighbors = 0.0;  ///< pairs / |D|
};

std::string report_header();
std::string format_report_row(const RunReport& r);

struct GenerateOptions {
  std::size_t count = 0;
  std::size_t dims = 2;
  double lo = 0.0;
  double hi = 100.0;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

int cmd_generate(const GenerateOptions& opts, std::ostream& out);

struct JoinOptions {
  std::filesystem::path input;
  std::size_t dims = 2;
  bool header = false;
  double eps = 0.0;
  JoinMode mode = JoinMode::baseline;
  std::size_t workers = 1;
  std::size_t buffer = std::size_t{1} << 24;
  std::size_t min_batches = 3;
  bool include_self_pairs = true;
  bool count_only = false;
  std::optional<std::filesystem::path> out;  ///< pair file
  std::string label;
};

/// Builds the grid and joins `d`, streaming pairs to `sink` unless
/// count_only is set.
RunReport run_join(const Dataset& d, const std::string& dataset_name, const JoinOptions& opts,
                   ResultSink* sink);

int cmd_join(const JoinOptions& opts, std::ostream& out);

struct ValidateOptions {
  std::filesystem::path input;
  std::size_t dims = 2;
  bool header = false;
  double eps = 0.0;
  JoinMode mode = JoinMode::baseline;
  std::size_t workers = 1;
  bool include_self_pairs = true;
  /// Relative perturbation of the engine's eps, for exercising the FAIL path.
  double perturb_eps = 0.0;
  std::optional<std::filesystem::path> engine_pairs_out;
  std::optional<std::filesystem::path> oracle_pairs_out;
};

struct Verdict {
  bool pass = false;
  std::uint64_t engine_pairs = 0;
  std::uint64_t oracle_pairs = 0;
  std::string divergence;  ///< empty on pass
};

/// Element-wise comparison of two sorted pair lists.
Verdict compare_pairs(const std::vector<ResultPair>& engine, const std::vector<ResultPair>& oracle);

Verdict validate(const Dataset& d, const ValidateOptions& opts);

/// Exit 0 on PASS, 1 on FAIL. Throws UsageError for datasets above the
/// oracle bound.
int cmd_validate(const ValidateOptions& opts, std::ostream& out);

/// Flat "key = value" sweep description. '#' starts a comment. Keys:
///   label, input, header, count, dims, lo, hi, seed, eps, modes, trials,
///   workers, buffer, min_batches, count_only
/// `dims`, `eps` and `modes` take comma-separated lists. With `input` the
/// dataset is read from that CSV and `dims` must name one dimensionality.
struct BenchSpec {
  std::string label = "bench";
  std::optional<std::filesystem::path> input;
  bool header = false;
  std::size_t count = 100000;
  std::vector<std::size_t> dims{2};
  double lo = 0.0;
  double hi = 100.0;
  std::uint64_t seed = 1;
  std::vector<double> eps{1.0};
  std::vector<JoinMode> modes{JoinMode::baseline};
  std::size_t trials = 3;
  std::size_t workers = 1;
  std::size_t buffer = std::size_t{1} << 24;
  std::size_t min_batches = 3;
  bool count_only = true;
};

BenchSpec parse_bench_spec(std::string_view text);

struct BenchRow {
  RunReport report;  ///< times are means over the trials
  std::size_t trials = 0;
  std::optional<double> candidate_ratio;  ///< vs. baseline of the same cell
  std::optional<double> probe_ratio;
  std::string error;
};

std::vector<BenchRow> run_bench(const BenchSpec& spec);

/// Report columns followed by trials,candidate_ratio,probe_ratio,error.
std::string bench_header();
std::string format_bench_row(const BenchRow& row);

int cmd_bench(const std::filesystem::path& spec_path, std::ostream& out);

}  // namespace simjoin::cli
