#include "bloomclock/metrics.hpp"

#include <string>

#include "bloomclock/errors.hpp"
#include "bloomclock/probability.hpp"

namespace bloomclock {

std::vector<EventRef> sample_slice(const ExecutionLog& log, const SliceSpec& spec) {
  const std::uint64_t last = log.events.size();
  const std::uint64_t start = spec.start_gsn.value_or(10ULL * log.config.n);
  const std::uint64_t end = spec.end_gsn.value_or(last);
  if (spec.stride < 1) throw DomainError("slice stride must be >= 1");
  if (start < 1) throw DomainError("slice start must be >= 1");
  if (end > last) {
    throw DomainError("slice end " + std::to_string(end) + " beyond log of " + std::to_string(last) + " events");
  }
  if (start > end) {
    throw DomainError("empty slice: start " + std::to_string(start) + " > end " + std::to_string(end));
  }
  std::vector<EventRef> out;
  out.reserve((end - start) / spec.stride + 1);
  for (std::uint64_t g = start; g <= end; g += spec.stride) out.emplace_back(log.events[g - 1]);
  return out;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kTruePositive:
      return "TP";
    case Outcome::kFalsePositive:
      return "FP";
    case Outcome::kTrueNegative:
      return "TN";
    case Outcome::kFalseNegative:
      return "FN";
  }
  return "?";
}

Outcome parse_outcome(std::string_view s) {
  if (s == "TP") return Outcome::kTruePositive;
  if (s == "FP") return Outcome::kFalsePositive;
  if (s == "TN") return Outcome::kTrueNegative;
  if (s == "FN") return Outcome::kFalseNegative;
  throw DomainError("unknown outcome '" + std::string(s) + "'");
}

Outcome classify_pair(const EventRecord& y, const EventRecord& z) {
  const bool actual = vector_happened_before(y.vector_ts, z.vector_ts);
  const bool predicted = bloom_leq(y.bloom_ts, z.bloom_ts);
  if (actual) return predicted ? Outcome::kTruePositive : Outcome::kFalseNegative;
  return predicted ? Outcome::kFalsePositive : Outcome::kTrueNegative;
}

void ConfusionCounts::add(Outcome o) noexcept {
  switch (o) {
    case Outcome::kTruePositive:
      ++tp;
      break;
    case Outcome::kFalsePositive:
      ++fp;
      break;
    case Outcome::kTrueNegative:
      ++tn;
      break;
    case Outcome::kFalseNegative:
      ++fn;
      break;
  }
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) noexcept {
  tp += other.tp;
  fp += other.fp;
  tn += other.tn;
  fn += other.fn;
  return *this;
}

ConfusionCounts classify_events(const std::vector<EventRef>& events) {
  ConfusionCounts counts;
  for (std::size_t a = 0; a < events.size(); ++a) {
    for (std::size_t b = 0; b < events.size(); ++b) {
      if (a != b) counts.add(classify_pair(events[a], events[b]));
    }
  }
  return counts;
}

MetricsReport compute_metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw DomainError("no pairs were classified");
  const auto ratio = [](std::uint64_t num, std::uint64_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
  };
  MetricsReport r;
  r.counts = c;
  r.accuracy = ratio(c.tp + c.tn, c.total());
  if (c.tp + c.fp == 0) {
    r.precision = 1.0;
    r.precision_sentinel = true;
  } else {
    r.precision = ratio(c.tp, c.tp + c.fp);
  }
  if (c.tp + c.fn == 0) {
    r.recall = 1.0;
    r.recall_sentinel = true;
  } else {
    r.recall = ratio(c.tp, c.tp + c.fn);
  }
  if (c.fp + c.tn == 0) {
    r.fpr = 0.0;
    r.fpr_sentinel = true;
  } else {
    r.fpr = ratio(c.fp, c.fp + c.tn);
  }
  r.alpha = causality_spread(c);
  return r;
}

double causality_spread(const ConfusionCounts& c) {
  if (c.total() == 0) throw DomainError("causality spread over zero pairs");
  return static_cast<double>(c.tp + c.fn) / static_cast<double>(c.total());
}

MetricsReport slice_metrics(const ExecutionLog& log, const SliceSpec& spec) {
  return compute_metrics(classify_events(sample_slice(log, spec)));
}

std::vector<CurveRow> probability_curve(const ExecutionLog& log, std::uint64_t y_gsn, std::uint64_t z_from,
                                        std::uint64_t z_to) {
  if (!(y_gsn >= 1 && y_gsn < z_from && z_from <= z_to && z_to <= log.events.size())) {
    throw DomainError("curve range requires 1 <= y < z_from <= z_to <= " + std::to_string(log.events.size()) +
                      " (got y=" + std::to_string(y_gsn) + ", z=" + std::to_string(z_from) + ".." +
                      std::to_string(z_to) + ")");
  }
  const EventRecord& y = log.at_gsn(y_gsn);
  std::vector<CurveRow> rows;
  rows.reserve(z_to - z_from + 1);
  for (std::uint64_t g = z_from; g <= z_to; ++g) {
    const EventRecord& z = log.at_gsn(g);
    const ProbabilityReport p = classify_probabilities(y.bloom_ts, z.bloom_ts);
    rows.push_back(CurveRow{g, p.pr_p, p.pr_fp_step, p.pr_fp_smooth, classify_pair(y, z)});
  }
  return rows;
}

}  // namespace bloomclock
