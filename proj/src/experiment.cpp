#include "bloomclock/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "bloomclock/errors.hpp"

namespace bloomclock {

MeanMetrics mean_of(std::span<const MetricsReport> reports) {
  MeanMetrics m;
  if (reports.empty()) return m;
  for (const auto& r : reports) {
    m.precision += r.precision;
    m.accuracy += r.accuracy;
    m.recall += r.recall;
    m.fpr += r.fpr;
    m.alpha += r.alpha;
  }
  const double n = static_cast<double>(reports.size());
  m.precision /= n;
  m.accuracy /= n;
  m.recall /= n;
  m.fpr /= n;
  m.alpha /= n;
  return m;
}

MeanMetrics mean_of(std::span<const MeanMetrics> means) {
  MeanMetrics m;
  if (means.empty()) return m;
  for (const auto& r : means) {
    m.precision += r.precision;
    m.accuracy += r.accuracy;
    m.recall += r.recall;
    m.fpr += r.fpr;
    m.alpha += r.alpha;
  }
  const double n = static_cast<double>(means.size());
  m.precision /= n;
  m.accuracy /= n;
  m.recall /= n;
  m.fpr /= n;
  m.alpha /= n;
  return m;
}

RunArtifact run_experiment(const ExperimentConfig& config, std::span<const std::uint64_t> seeds,
                           const SliceSpec& slice) {
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  config.validate();
  RunArtifact artifact;
  artifact.config = config;
  artifact.config.seed = seeds.front();
  artifact.slice = slice;
  std::vector<MetricsReport> reports;
  for (std::uint64_t seed : seeds) {
    ExperimentConfig c = config;
    c.seed = seed;
    const ExecutionLog log = run_simulation(c);
    reports.push_back(slice_metrics(log, slice));
    artifact.runs.push_back(RunResult{seed, reports.back()});
  }
  artifact.mean = mean_of(reports);
  return artifact;
}

std::vector<std::uint64_t> default_seeds(std::uint32_t runs) {
  std::vector<std::uint64_t> seeds(runs);
  for (std::uint32_t i = 0; i < runs; ++i) seeds[i] = i + 1;
  return seeds;
}

std::uint32_t WidthSetting::resolve(std::uint32_t n) const {
  if (!(value > 0.0) || !std::isfinite(value)) throw ConfigError("clock width must be positive");
  if (mode == Mode::kAbsolute) {
    if (value != std::floor(value)) throw ConfigError("absolute clock width must be an integer");
    return static_cast<std::uint32_t>(value);
  }
  const double scaled = std::round(value * n);
  return static_cast<std::uint32_t>(std::max(1.0, scaled));
}

std::string WidthSetting::label() const {
  std::ostringstream os;
  if (mode == Mode::kRatio) {
    os << value << "n";
  } else {
    os << static_cast<std::uint32_t>(value);
  }
  return os.str();
}

std::vector<SweepCell> run_sweep(const SweepSpec& spec, unsigned jobs) {
  if (spec.n_values.empty() || spec.m_values.empty() || spec.k_values.empty() || spec.pr_i_values.empty()) {
    throw ConfigError("sweep expands to no cells");
  }
  if (spec.seeds.empty()) throw ConfigError("sweep needs at least one seed");

  std::vector<SweepCell> cells;
  for (std::uint32_t n : spec.n_values) {
    for (const WidthSetting& w : spec.m_values) {
      for (std::uint32_t k : spec.k_values) {
        for (double pr_i : spec.pr_i_values) {
          SweepCell cell;
          cell.index = cells.size();
          cell.width = w;
          cell.config.topology = spec.topology;
          cell.config.n = n;
          cell.config.k = k;
          cell.config.pr_i = pr_i;
          cell.config.gsn_limit = spec.gsn_limit;
          cell.config.receive_fallback = spec.receive_fallback;
          cell.config.seed = spec.seeds.front();
          cells.push_back(std::move(cell));
        }
      }
    }
  }

  const auto run_cell = [&](SweepCell& cell) {
    try {
      cell.config.m = cell.width.resolve(cell.config.n);
      cell.artifact = run_experiment(cell.config, spec.seeds, spec.slice);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells.size())));
  if (workers == 1) {
    for (auto& cell : cells) run_cell(cell);
    return cells;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(cells[i]);
    });
  }
  pool.clear();
  return cells;
}

std::vector<SweepGroup> aggregate_sweep(const std::vector<SweepCell>& cells, bool over_m, bool over_k) {
  using Key = std::tuple<std::uint32_t, double, std::string, std::uint32_t>;
  std::map<Key, std::vector<MeanMetrics>> buckets;
  std::vector<Key> order;
  for (const auto& cell : cells) {
    if (!cell.artifact) continue;
    Key key{cell.config.n, cell.config.pr_i, over_m ? std::string() : cell.width.label(),
            over_k ? 0u : cell.config.k};
    auto [it, inserted] = buckets.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(cell.artifact->mean);
  }
  std::vector<SweepGroup> groups;
  for (const Key& key : order) {
    const auto& means = buckets.at(key);
    SweepGroup g;
    g.n = std::get<0>(key);
    g.pr_i = std::get<1>(key);
    if (!over_m) g.m_label = std::get<2>(key);
    if (!over_k) g.k = std::get<3>(key);
    g.cells = means.size();
    g.mean = mean_of(std::span<const MeanMetrics>(means));
    groups.push_back(std::move(g));
  }
  return groups;
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

}  // namespace bloomclock
