// SPDX-License-Identifier: Apache-2.0

#include "simjoin/cli/commands.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "simjoin/grid_index.hpp"
#include "simjoin/oracle.hpp"

namespace simjoin::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fixed(double v, int digits) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError("bench spec: bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw UsageError("bench spec: bad boolean '" + std::string(text) + "' for " + std::string(key));
}

}  // namespace

std::string report_header() {
  return "dataset,label,D,n,eps,mode,workers,build_s,join_s,cells_probed,candidates_tested,pairs,"
         "mean_neighbors,batches";
}

std::string format_report_row(const RunReport& r) {
  std::ostringstream os;
  os << csv_field(r.dataset) << ',' << csv_field(r.label) << ',' << r.points << ',' << r.dims << ','
     << shortest(r.eps) << ',' << to_string(r.mode) << ',' << r.workers << ',' << fixed(r.build_s, 6)
     << ',' << fixed(r.join_s, 6) << ',' << r.stats.cells_probed << ',' << r.stats.candidates_tested
     << ',' << r.pairs << ',' << fixed(r.mean_neighbors, 6) << ',' << r.stats.batches;
  return os.str();
}

int cmd_generate(const GenerateOptions& opts, std::ostream& out) {
  if (!(opts.lo < opts.hi)) throw UsageError("--lo must be less than --hi");
  if (opts.count == 0) throw UsageError("--count must be positive");
  const Dataset d = generate_uniform(opts.count, opts.dims, opts.lo, opts.hi, opts.seed);
  write_csv(opts.out, d);
  out << "wrote " << d.size() << " points (" << d.dims() << "-D) to " << opts.out.string() << '\n';
  return 0;
}

RunReport run_join(const Dataset& d, const std::string& dataset_name, const JoinOptions& opts,
                   ResultSink* sink) {
  JoinConfig cfg;
  cfg.eps = opts.eps;
  cfg.mode = opts.mode;
  cfg.workers = opts.workers;
  cfg.buffer_capacity = opts.buffer;
  cfg.min_batches = opts.min_batches;
  cfg.include_self_pairs = opts.include_self_pairs;
  cfg.validate();

  RunReport r;
  r.dataset = dataset_name;
  r.label = opts.label;
  r.points = d.size();
  r.dims = d.dims();
  r.eps = opts.eps;
  r.mode = opts.mode;
  r.workers = opts.workers;

  auto t0 = Clock::now();
  const GridIndex index = GridIndex::build(d, opts.eps);
  r.build_s = seconds_since(t0);

  t0 = Clock::now();
  if (opts.count_only || sink == nullptr) {
    const CountResult c = count_only_join(d, index, cfg);
    r.stats = c.stats;
    r.pairs = c.total_pairs;
  } else {
    r.stats = self_join(d, index, cfg, *sink);
    r.pairs = r.stats.pairs_emitted;
  }
  r.join_s = seconds_since(t0);
  r.mean_neighbors = static_cast<double>(r.pairs) / static_cast<double>(r.points);
  return r;
}

int cmd_join(const JoinOptions& opts, std::ostream& out) {
  if (!(opts.eps > 0.0)) throw UsageError("--eps must be positive");
  const Dataset d = load_csv(opts.input, opts.dims, {opts.header});
  RunReport r;
  if (opts.out && !opts.count_only) {
    PairFileSink sink(*opts.out);
    r = run_join(d, opts.input.string(), opts, &sink);
    sink.close();
  } else if (opts.count_only) {
    r = run_join(d, opts.input.string(), opts, nullptr);
  } else {
    CountingSink sink;
    r = run_join(d, opts.input.string(), opts, &sink);
  }
  out << report_header() << '\n' << format_report_row(r) << '\n';
  return 0;
}

Verdict compare_pairs(const std::vector<ResultPair>& engine, const std::vector<ResultPair>& oracle) {
  Verdict v;
  v.engine_pairs = engine.size();
  v.oracle_pairs = oracle.size();
  const std::size_t common = std::min(engine.size(), oracle.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (engine[i] != oracle[i]) {
      v.divergence = "first divergence at position " + std::to_string(i) + ": engine (" +
                     std::to_string(engine[i].key) + "," + std::to_string(engine[i].value) +
                     ") oracle (" + std::to_string(oracle[i].key) + "," +
                     std::to_string(oracle[i].value) + ")";
      return v;
    }
  }
  if (engine.size() != oracle.size()) {
    const bool engine_longer = engine.size() > oracle.size();
    const ResultPair& extra = engine_longer ? engine[common] : oracle[common];
    v.divergence = "first divergence at position " + std::to_string(common) + ": " +
                   (engine_longer ? "engine" : "oracle") + " has extra pair (" +
                   std::to_string(extra.key) + "," + std::to_string(extra.value) + ")";
    return v;
  }
  v.pass = true;
  return v;
}

Verdict validate(const Dataset& d, const ValidateOptions& opts) {
  if (d.size() > oracle::kOracleMaxPoints) {
    throw UsageError("dataset has " + std::to_string(d.size()) +
                     " points; validation is limited to " +
                     std::to_string(oracle::kOracleMaxPoints));
  }
  const double engine_eps = opts.eps * (1.0 + opts.perturb_eps);
  JoinConfig cfg;
  cfg.eps = engine_eps;
  cfg.mode = opts.mode;
  cfg.workers = opts.workers;
  cfg.include_self_pairs = opts.include_self_pairs;
  const GridIndex index = GridIndex::build(d, engine_eps);
  MemorySink sink;
  self_join(d, index, cfg, sink);
  const std::vector<ResultPair> engine = sink.sorted_pairs();
  const oracle::OracleResult ref =
      oracle::brute_force(d, opts.eps, opts.include_self_pairs, opts.workers);

  auto dump = [](const std::optional<std::filesystem::path>& path, const std::vector<ResultPair>& pairs) {
    if (!path) return;
    std::ofstream f(*path, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot open " + path->string() + " for writing");
    write_pairs(f, pairs);
  };
  dump(opts.engine_pairs_out, engine);
  dump(opts.oracle_pairs_out, ref.pairs);
  return compare_pairs(engine, ref.pairs);
}

int cmd_validate(const ValidateOptions& opts, std::ostream& out) {
  if (!(opts.eps > 0.0)) throw UsageError("--eps must be positive");
  const Dataset d = load_csv(opts.input, opts.dims, {opts.header});
  const Verdict v = validate(d, opts);
  out << (v.pass ? "PASS" : "FAIL") << " engine_pairs=" << v.engine_pairs
      << " oracle_pairs=" << v.oracle_pairs << '\n';
  if (!v.pass) out << v.divergence << '\n';
  return v.pass ? 0 : 1;
}

BenchSpec parse_bench_spec(std::string_view text) {
  BenchSpec spec;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("bench spec line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key == "label") {
      spec.label = value;
    } else if (key == "input") {
      spec.input = std::filesystem::path(std::string(value));
    } else if (key == "header") {
      spec.header = parse_bool(key, value);
    } else if (key == "count") {
      spec.count = parse_number<std::size_t>(key, value);
    } else if (key == "dims") {
      spec.dims.clear();
      for (auto v : split_list(value)) spec.dims.push_back(parse_number<std::size_t>(key, v));
    } else if (key == "lo") {
      spec.lo = parse_number<double>(key, value);
    } else if (key == "hi") {
      spec.hi = parse_number<double>(key, value);
    } else if (key == "seed") {
      spec.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "eps") {
      spec.eps.clear();
      for (auto v : split_list(value)) spec.eps.push_back(parse_number<double>(key, v));
    } else if (key == "modes") {
      spec.modes.clear();
      for (auto v : split_list(value)) {
        const auto m = parse_mode(v);
        if (!m) throw UsageError("bench spec: unknown mode '" + std::string(v) + "'");
        spec.modes.push_back(*m);
      }
    } else if (key == "trials") {
      spec.trials = parse_number<std::size_t>(key, value);
    } else if (key == "workers") {
      spec.workers = parse_number<std::size_t>(key, value);
    } else if (key == "buffer") {
      spec.buffer = parse_number<std::size_t>(key, value);
    } else if (key == "min_batches") {
      spec.min_batches = parse_number<std::size_t>(key, value);
    } else if (key == "count_only") {
      spec.count_only = parse_bool(key, value);
    } else {
      throw UsageError("bench spec line " + std::to_string(line_no) + ": unknown key '" +
                       std::string(key) + "'");
    }
  }
  if (spec.trials == 0) throw UsageError("bench spec: trials must be positive");
  if (spec.dims.empty() || spec.eps.empty() || spec.modes.empty()) {
    throw UsageError("bench spec: dims, eps and modes must be non-empty");
  }
  if (spec.input && spec.dims.size() != 1) {
    throw UsageError("bench spec: with input, dims must name a single dimensionality");
  }
  return spec;
}

std::vector<BenchRow> run_bench(const BenchSpec& spec) {
  std::vector<BenchRow> rows;
  for (const std::size_t n : spec.dims) {
    std::string name;
    std::optional<Dataset> data;
    std::string load_error;
    try {
      if (spec.input) {
        name = spec.input->string();
        data = load_csv(*spec.input, n, {spec.header});
      } else {
        name = "uniform-n" + std::to_string(n) + "-c" + std::to_string(spec.count) + "-s" +
               std::to_string(spec.seed);
        data = generate_uniform(spec.count, n, spec.lo, spec.hi, spec.seed);
      }
    } catch (const std::exception& e) {
      load_error = e.what();
    }

    for (const double eps : spec.eps) {
      std::optional<JoinStats> baseline;
      const std::size_t cell_start = rows.size();
      for (const JoinMode mode : spec.modes) {
        BenchRow row;
        row.report.dataset = name;
        row.report.label = spec.label;
        row.report.dims = n;
        row.report.eps = eps;
        row.report.mode = mode;
        row.report.workers = spec.workers;
        row.error = load_error;
        if (data) {
          row.report.points = data->size();
          JoinOptions opts;
          opts.eps = eps;
          opts.mode = mode;
          opts.workers = spec.workers;
          opts.buffer = spec.buffer;
          opts.min_batches = spec.min_batches;
          opts.count_only = spec.count_only;
          opts.label = spec.label;
          try {
            double build = 0.0;
            double join = 0.0;
            for (std::size_t t = 0; t < spec.trials; ++t) {
              CountingSink sink;
              RunReport r = run_join(*data, name, opts, spec.count_only ? nullptr : &sink);
              build += r.build_s;
              join += r.join_s;
              row.report = r;
            }
            row.report.build_s = build / static_cast<double>(spec.trials);
            row.report.join_s = join / static_cast<double>(spec.trials);
            row.trials = spec.trials;
            if (mode == JoinMode::baseline) baseline = row.report.stats;
          } catch (const std::exception& e) {
            row.error = e.what();
          }
        }
        rows.push_back(std::move(row));
      }
      if (baseline) {
        for (std::size_t i = cell_start; i < rows.size(); ++i) {
          if (!rows[i].error.empty()) continue;
          const JoinStats& s = rows[i].report.stats;
          if (baseline->candidates_tested > 0) {
            rows[i].candidate_ratio = static_cast<double>(s.candidates_tested) /
                                      static_cast<double>(baseline->candidates_tested);
          }
          if (baseline->cells_probed > 0) {
            rows[i].probe_ratio =
                static_cast<double>(s.cells_probed) / static_cast<double>(baseline->cells_probed);
          }
        }
      }
    }
  }
  return rows;
}

std::string bench_header() { return report_header() + ",trials,candidate_ratio,probe_ratio,error"; }

std::string format_bench_row(const BenchRow& row) {
  std::string s = format_report_row(row.report);
  s += ',' + std::to_string(row.trials);
  s += ',' + (row.candidate_ratio ? fixed(*row.candidate_ratio, 6) : std::string());
  s += ',' + (row.probe_ratio ? fixed(*row.probe_ratio, 6) : std::string());
  s += ',' + csv_field(row.error);
  return s;
}

int cmd_bench(const std::filesystem::path& spec_path, std::ostream& out) {
  std::ifstream in(spec_path);
  if (!in) throw UsageError("cannot open bench spec " + spec_path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const BenchSpec spec = parse_bench_spec(buf.str());
  out << bench_header() << '\n';
  for (const BenchRow& row : run_bench(spec)) out << format_bench_row(row) << '\n';
  return 0;
}

}  // namespace simjoin::cli
