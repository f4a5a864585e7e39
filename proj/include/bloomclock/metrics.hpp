#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "bloomclock/simulation.hpp"

namespace bloomclock {

// Sampled events: start, start + stride, ... up to end. Unset bounds resolve
// against the log: start = 10 n, end = last GSN.
struct SliceSpec {
  std::optional<std::uint64_t> start_gsn;
  std::uint64_t stride = 100;
  std::optional<std::uint64_t> end_gsn;
};

using EventRef = std::reference_wrapper<const EventRecord>;

// Throws DomainError when the slice is empty or its bounds are invalid.
std::vector<EventRef> sample_slice(const ExecutionLog& log, const SliceSpec& spec);

enum class Outcome { kTruePositive, kFalsePositive, kTrueNegative, kFalseNegative };

std::string_view to_string(Outcome o);  // "TP", "FP", "TN", "FN"
Outcome parse_outcome(std::string_view s);

// Is y -> z? The vector clocks are the truth, bloom_leq the prediction.
Outcome classify_pair(const EventRecord& y, const EventRecord& z);

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  void add(Outcome o) noexcept;
  ConfusionCounts& operator+=(const ConfusionCounts& other) noexcept;
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Every ordered pair (y, z) with y != z, so s events give s (s - 1) pairs.
ConfusionCounts classify_events(const std::vector<EventRef>& events);

struct MetricsReport {
  ConfusionCounts counts;
  double precision = 0.0;
  double accuracy = 0.0;
  double recall = 0.0;
  double fpr = 0.0;
  double alpha = 0.0;
  // Set when the ratio's denominator was zero and a sentinel was reported:
  // precision 1 with no positive predictions, recall 1 with no actual
  // positives, fpr 0 with no actual negatives.
  bool precision_sentinel = false;
  bool recall_sentinel = false;
  bool fpr_sentinel = false;
};

// Throws DomainError for all-zero counts.
MetricsReport compute_metrics(const ConfusionCounts& counts);

// (tp + fn) / total. Throws DomainError when total is zero.
double causality_spread(const ConfusionCounts& counts);

// Sample, classify and score in one step.
MetricsReport slice_metrics(const ExecutionLog& log, const SliceSpec& spec = {});

struct CurveRow {
  std::uint64_t z_gsn = 0;
  double pr_p = 0.0;
  double pr_fp_step = 0.0;
  double pr_fp_smooth = 0.0;
  Outcome outcome = Outcome::kTrueNegative;

  friend bool operator==(const CurveRow&, const CurveRow&) = default;
};

// One row per z in [z_from, z_to], comparing each against the fixed y.
// Requires y_gsn < z_from <= z_to <= last GSN; throws DomainError otherwise.
std::vector<CurveRow> probability_curve(const ExecutionLog& log, std::uint64_t y_gsn, std::uint64_t z_from,
                                        std::uint64_t z_to);

}  // namespace bloomclock
