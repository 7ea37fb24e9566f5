// SPDX-License-Identifier: Apache-2.0
//
// simjoin: generate | join | validate | bench

#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "simjoin/cli/commands.hpp"

namespace {

const std::map<std::string, simjoin::JoinMode> kModes{
    {"baseline", simjoin::JoinMode::baseline},
    {"unicomp", simjoin::JoinMode::unicomp},
};

}  // namespace

int main(int argc, char** argv) {
  using namespace simjoin;
  CLI::App app{"Grid-indexed epsilon self-join for 2-6 dimensional points"};
  app.require_subcommand(1);

  cli::GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Write a uniform synthetic dataset as CSV");
  generate->add_option("--count", gen.count, "Number of points")->required();
  generate->add_option("--dims", gen.dims, "Dimensionality")->required();
  generate->add_option("--lo", gen.lo, "Lower coordinate bound");
  generate->add_option("--hi", gen.hi, "Upper coordinate bound");
  generate->add_option("--seed", gen.seed, "RNG seed (mt19937_64)");
  generate->add_option("--out", gen.out, "Output CSV path")->required();

  cli::JoinOptions join;
  auto* join_cmd = app.add_subcommand("join", "Run the self-join and print a report row");
  join_cmd->add_option("--input", join.input, "Input CSV")->required()->check(CLI::ExistingFile);
  join_cmd->add_option("--dims", join.dims, "Dimensionality")->required();
  join_cmd->add_flag("--header", join.header, "Skip the first line of the input");
  join_cmd->add_option("--eps", join.eps, "Distance threshold")->required();
  std::string join_mode = "baseline";
  join_cmd->add_option("--mode", join_mode, "baseline or unicomp")->check(CLI::IsMember(kModes));
  join_cmd->add_option("--workers", join.workers, "Worker threads")->check(CLI::PositiveNumber);
  join_cmd->add_option("--buffer", join.buffer, "Target pairs per result batch")->check(CLI::PositiveNumber);
  join_cmd->add_option("--min-batches", join.min_batches, "Minimum number of batches")
      ->check(CLI::PositiveNumber);
  join_cmd->add_option("--out", join.out, "Write key,value pairs to this file");
  join_cmd->add_option("--label", join.label, "Free-form label for the report row");
  join_cmd->add_flag("--count-only", join.count_only, "Count pairs without materializing them");
  bool no_self = false;
  join_cmd->add_flag("--no-self", no_self, "Exclude (p,p) pairs");

  cli::ValidateOptions val;
  auto* validate = app.add_subcommand("validate", "Compare the engine against the brute-force oracle");
  validate->add_option("--input", val.input, "Input CSV")->required()->check(CLI::ExistingFile);
  validate->add_option("--dims", val.dims, "Dimensionality")->required();
  validate->add_flag("--header", val.header, "Skip the first line of the input");
  validate->add_option("--eps", val.eps, "Distance threshold")->required();
  std::string val_mode = "baseline";
  validate->add_option("--mode", val_mode, "baseline or unicomp")->check(CLI::IsMember(kModes));
  validate->add_option("--workers", val.workers, "Worker threads")->check(CLI::PositiveNumber);
  validate->add_option("--engine-pairs", val.engine_pairs_out, "Write the engine's sorted pairs here");
  validate->add_option("--oracle-pairs", val.oracle_pairs_out, "Write the oracle's sorted pairs here");
  validate->add_option("--perturb-eps", val.perturb_eps,
                       "Scale the engine's eps by (1 + value); testing aid for the FAIL path");
  bool val_no_self = false;
  validate->add_flag("--no-self", val_no_self, "Exclude (p,p) pairs");

  std::string bench_spec;
  auto* bench = app.add_subcommand("bench", "Run a sweep described by a key = value spec file");
  bench->add_option("spec", bench_spec, "Sweep spec file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) return cli::cmd_generate(gen, std::cout);
    if (*join_cmd) {
      join.include_self_pairs = !no_self;
      join.mode = kModes.at(join_mode);
      return cli::cmd_join(join, std::cout);
    }
    if (*validate) {
      val.include_self_pairs = !val_no_self;
      val.mode = kModes.at(val_mode);
      return cli::cmd_validate(val, std::cout);
    }
    if (*bench) return cli::cmd_bench(bench_spec, std::cout);
  } catch (const cli::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
