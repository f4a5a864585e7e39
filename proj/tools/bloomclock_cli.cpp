// Experiment runner: simulate, score against the vector-clock oracle, and
// write metrics tables, probability curves and traces.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bloomclock/errors.hpp"
#include "bloomclock/experiment.hpp"
#include "bloomclock/io.hpp"
#include "bloomclock/metrics.hpp"
#include "bloomclock/simulation.hpp"

namespace fs = std::filesystem;
using namespace bloomclock;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
  std::string topology = "complete";
  std::vector<std::uint64_t> seeds;
  std::uint32_t runs = 3;
  std::optional<std::uint64_t> gsn_limit;
  std::optional<std::uint64_t> slice_start;
  std::uint64_t slice_stride = 100;
  std::optional<std::uint64_t> slice_end;
  std::optional<std::uint32_t> messages_per_client;
  std::string receive_fallback = "skip";
  std::string out_dir = ".";

  std::vector<std::uint64_t> seed_list() const { return seeds.empty() ? default_seeds(runs) : seeds; }
  SliceSpec slice() const { return SliceSpec{slice_start, slice_stride, slice_end}; }
};

struct SingleOptions {
  std::uint32_t n = 100;
  std::optional<std::uint32_t> m;
  std::optional<double> m_ratio;
  std::uint32_t k = 2;
  double pr_i = 0.0;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--topology", o.topology, "complete | star | broadcast")
      ->check(CLI::IsMember({"complete", "star", "broadcast"}));
  app->add_option("--seed", o.seeds, "Seed (repeatable); overrides --runs");
  app->add_option("--runs", o.runs, "Use seeds 1..N")->check(CLI::PositiveNumber);
  app->add_option("--gsn-limit", o.gsn_limit, "Termination GSN (default n^2)");
  app->add_option("--slice-start", o.slice_start, "First sampled GSN (default 10n)");
  app->add_option("--slice-stride", o.slice_stride, "GSN step between sampled events")->check(CLI::PositiveNumber);
  app->add_option("--slice-end", o.slice_end, "Last sampled GSN (default: end of log)");
  app->add_option("--messages-per-client", o.messages_per_client, "Star rounds per client (default n)");
  app->add_option("--receive-fallback", o.receive_fallback, "skip | send | block")
      ->check(CLI::IsMember({"skip", "send", "block"}));
  app->add_option("--out", o.out_dir, "Output directory");
}

void add_single(CLI::App* app, SingleOptions& o) {
  app->add_option("--n", o.n, "Process count (clients for star)");
  auto* m = app->add_option("--m", o.m, "Bloom clock width");
  auto* ratio = app->add_option("--m-ratio", o.m_ratio, "Bloom clock width as a fraction of n");
  m->excludes(ratio);
  app->add_option("--k", o.k, "Hash function count");
  app->add_option("--pri", o.pr_i, "Internal event probability");
}

ExperimentConfig make_config(const CommonOptions& c, const SingleOptions& s) {
  ExperimentConfig config;
  config.topology = parse_topology(c.topology);
  config.n = s.n;
  config.m = s.m_ratio ? WidthSetting::ratio(*s.m_ratio).resolve(s.n) : s.m.value_or(WidthSetting::ratio(0.1).resolve(s.n));
  config.k = s.k;
  config.pr_i = s.pr_i;
  config.gsn_limit = c.gsn_limit;
  config.messages_per_client = c.messages_per_client;
  config.receive_fallback = parse_receive_fallback(c.receive_fallback);
  config.seed = c.seed_list().front();
  config.validate();
  return config;
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void print_mean(const std::string& label, const MeanMetrics& m) {
  std::cout << label << " precision=" << round3(m.precision) << " accuracy=" << round3(m.accuracy)
            << " recall=" << round3(m.recall) << " fpr=" << round3(m.fpr) << " alpha=" << round3(m.alpha) << '\n';
}

int cmd_run(const CommonOptions& c, const SingleOptions& s) {
  const ExperimentConfig config = make_config(c, s);
  const auto seeds = c.seed_list();
  const RunArtifact artifact = run_experiment(config, seeds, c.slice());
  const fs::path out = prepare_out(c.out_dir);
  write_file(out / "artifact.json", to_json(artifact).dump(2) + "\n");
  std::ofstream csv(out / "metrics.csv");
  write_metrics_csv(csv, artifact);
  for (const auto& r : artifact.runs) {
    print_mean("seed " + std::to_string(r.seed),
               MeanMetrics{r.report.precision, r.report.accuracy, r.report.recall, r.report.fpr, r.report.alpha});
  }
  print_mean("mean", artifact.mean);
  return 0;
}

struct SweepOptions {
  std::vector<std::uint32_t> n{100};
  std::vector<std::uint32_t> m;
  std::vector<double> m_ratio;
  std::vector<std::uint32_t> k{2};
  std::vector<double> pr_i{0.0};
  std::vector<std::string> average_over;
  unsigned jobs = 1;
};

int cmd_sweep(const CommonOptions& c, const SweepOptions& o) {
  SweepSpec spec;
  spec.topology = parse_topology(c.topology);
  spec.n_values = o.n;
  for (auto m : o.m) spec.m_values.push_back(WidthSetting::absolute(m));
  for (auto r : o.m_ratio) spec.m_values.push_back(WidthSetting::ratio(r));
  if (spec.m_values.empty()) spec.m_values.push_back(WidthSetting::ratio(0.1));
  spec.k_values = o.k;
  spec.pr_i_values = o.pr_i;
  spec.seeds = c.seed_list();
  spec.slice = c.slice();
  spec.gsn_limit = c.gsn_limit;
  spec.receive_fallback = parse_receive_fallback(c.receive_fallback);

  const auto cells = run_sweep(spec, o.jobs);
  const fs::path out = prepare_out(c.out_dir);
  write_file(out / "sweep.json", to_json(cells).dump(2) + "\n");
  std::ofstream csv(out / "sweep.csv");
  write_sweep_csv(csv, cells);
  write_sweep_csv(std::cout, cells);

  bool over_m = false;
  bool over_k = false;
  for (const auto& axis : o.average_over) {
    over_m = over_m || axis == "m";
    over_k = over_k || axis == "k";
  }
  if (over_m || over_k) {
    const auto groups = aggregate_sweep(cells, over_m, over_k);
    std::ofstream agg(out / "aggregate.csv");
    write_groups_csv(agg, groups);
    std::cout << '\n';
    write_groups_csv(std::cout, groups);
  }
  std::size_t failed = 0;
  for (const auto& cell : cells) {
    if (!cell.artifact) {
      ++failed;
      std::cerr << "cell " << cell.index << " failed: " << cell.error << '\n';
    }
  }
  return failed == 0 ? 0 : kExitConfig;
}

struct CurveOptions {
  std::optional<std::uint64_t> y_gsn;
  std::optional<std::uint64_t> z_from;
  std::optional<std::uint64_t> z_to;
};

int cmd_curve(const CommonOptions& c, const SingleOptions& s, const CurveOptions& o) {
  const ExperimentConfig config = make_config(c, s);
  const ExecutionLog log = run_simulation(config);
  const std::uint64_t y = o.y_gsn.value_or(10ULL * config.n);
  const std::uint64_t z_from = o.z_from.value_or(y + 1);
  const std::uint64_t z_to = o.z_to.value_or(log.events.size());
  const auto rows = probability_curve(log, y, z_from, z_to);
  const fs::path out = prepare_out(c.out_dir);
  const fs::path path = out / "curve.csv";
  std::ofstream csv(path);
  write_curve_csv(csv, rows);
  std::size_t tp = 0, fp = 0, tn = 0;
  for (const auto& r : rows) {
    tp += r.outcome == Outcome::kTruePositive;
    fp += r.outcome == Outcome::kFalsePositive;
    tn += r.outcome == Outcome::kTrueNegative;
  }
  std::cout << path.string() << ": " << rows.size() << " rows (TP=" << tp << " FP=" << fp << " TN=" << tn
            << ")\n";
  return 0;
}

struct TraceOptions {
  std::optional<std::string> input;
};

int cmd_trace(const CommonOptions& c, const SingleOptions& s, const TraceOptions& o) {
  ExecutionLog log;
  if (o.input) {
    log = load_trace(*o.input);
  } else {
    log = run_simulation(make_config(c, s));
    const fs::path path = prepare_out(c.out_dir) / "trace.tsv";
    persist_trace(log, path);
    std::cout << "wrote " << path.string() << " (" << log.events.size() << " events)\n";
  }
  if (const auto bad = first_replay_mismatch(log)) {
    std::cerr << "replay mismatch at gsn " << *bad << '\n';
    return kExitConfig;
  }
  const MetricsReport r = slice_metrics(log, c.slice());
  std::cout << "tp=" << r.counts.tp << " fp=" << r.counts.fp << " tn=" << r.counts.tn << " fn=" << r.counts.fn
            << '\n';
  print_mean("slice", MeanMetrics{r.precision, r.accuracy, r.recall, r.fpr, r.alpha});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bloom clock causality experiments"};
  app.require_subcommand(1);

  CommonOptions run_common, sweep_common, curve_common, trace_common;
  SingleOptions run_single, curve_single, trace_single;
  SweepOptions sweep;
  CurveOptions curve;
  TraceOptions trace;

  auto* run = app.add_subcommand("run", "Run one configuration over several seeds");
  add_common(run, run_common);
  add_single(run, run_single);

  auto* sw = app.add_subcommand("sweep", "Run every combination of the listed parameters");
  add_common(sw, sweep_common);
  sw->add_option("--n", sweep.n, "Process counts")->delimiter(',');
  sw->add_option("--m", sweep.m, "Absolute clock widths")->delimiter(',');
  sw->add_option("--m-ratio", sweep.m_ratio, "Clock widths as fractions of n")->delimiter(',');
  sw->add_option("--k", sweep.k, "Hash counts")->delimiter(',');
  sw->add_option("--pri", sweep.pr_i, "Internal event probabilities")->delimiter(',');
  sw->add_option("--average-over", sweep.average_over, "Average cells over m and/or k")
      ->delimiter(',')
      ->check(CLI::IsMember({"m", "k"}));
  sw->add_option("--jobs", sweep.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* cv = app.add_subcommand("curve", "Emit pr_p / pr_fp for a fixed y against later events");
  add_common(cv, curve_common);
  add_single(cv, curve_single);
  cv->add_option("--y-gsn", curve.y_gsn, "GSN of y (default 10n)");
  cv->add_option("--z-from", curve.z_from, "First z GSN (default y + 1)");
  cv->add_option("--z-to", curve.z_to, "Last z GSN (default: end of log)");

  auto* tr = app.add_subcommand("trace", "Persist a simulated trace, or load and score one");
  add_common(tr, trace_common);
  add_single(tr, trace_single);
  tr->add_option("--in", trace.input, "Trace file to load instead of simulating");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_common, run_single);
    if (*sw) return cmd_sweep(sweep_common, sweep);
    if (*cv) return cmd_curve(curve_common, curve_single, curve);
    if (*tr) return cmd_trace(trace_common, trace_single, trace);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
