#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bloomclock/metrics.hpp"
#include "bloomclock/simulation.hpp"

namespace bloomclock {

struct MeanMetrics {
  double precision = 0.0;
  double accuracy = 0.0;
  double recall = 0.0;
  double fpr = 0.0;
  double alpha = 0.0;
};

MeanMetrics mean_of(std::span<const MetricsReport> reports);
MeanMetrics mean_of(std::span<const MeanMetrics> means);

struct RunResult {
  std::uint64_t seed = 0;
  MetricsReport report;
};

struct RunArtifact {
  ExperimentConfig config;  // config.seed is the first seed
  SliceSpec slice;
  std::vector<RunResult> runs;
  MeanMetrics mean;
  std::optional<std::string> trace_path;
  std::optional<std::string> curve_path;
};

// One simulation and slice evaluation per seed, then the arithmetic mean.
RunArtifact run_experiment(const ExperimentConfig& config, std::span<const std::uint64_t> seeds,
                           const SliceSpec& slice = {});

// Seeds 1..runs.
std::vector<std::uint64_t> default_seeds(std::uint32_t runs);

// Clock width either fixed or as a fraction of n.
struct WidthSetting {
  enum class Mode { kAbsolute, kRatio };
  Mode mode = Mode::kAbsolute;
  double value = 1.0;

  static WidthSetting absolute(std::uint32_t m) { return {Mode::kAbsolute, static_cast<double>(m)}; }
  static WidthSetting ratio(double r) { return {Mode::kRatio, r}; }
  // Ratio mode rounds r * n to the nearest integer, never below 1.
  std::uint32_t resolve(std::uint32_t n) const;
  std::string label() const;
};

struct SweepSpec {
  Topology topology = Topology::kComplete;
  std::vector<std::uint32_t> n_values;
  std::vector<WidthSetting> m_values;
  std::vector<std::uint32_t> k_values;
  std::vector<double> pr_i_values{0.0};
  std::vector<std::uint64_t> seeds;
  SliceSpec slice;
  std::optional<std::uint64_t> gsn_limit;
  ReceiveFallback receive_fallback = ReceiveFallback::kSkip;
};

struct SweepCell {
  std::size_t index = 0;
  ExperimentConfig config;
  WidthSetting width;
  std::optional<RunArtifact> artifact;
  std::string error;  // set instead of artifact when the cell failed
};

// Cells in n-major, then m, k, pr_i order. With jobs > 1 cells run on a
// worker pool; results keep cell order.
std::vector<SweepCell> run_sweep(const SweepSpec& spec, unsigned jobs = 1);

// Averages cell means over the m and/or k axes; one group per remaining key.
struct SweepGroup {
  std::uint32_t n = 0;
  double pr_i = 0.0;
  std::optional<std::string> m_label;  // unset when averaged over m
  std::optional<std::uint32_t> k;      // unset when averaged over k
  std::size_t cells = 0;
  MeanMetrics mean;
};

std::vector<SweepGroup> aggregate_sweep(const std::vector<SweepCell>& cells, bool over_m, bool over_k);

// Rounds half away from zero to three decimals, as used in table output.
double round3(double v);

}  // namespace bloomclock
