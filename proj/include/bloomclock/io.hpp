#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "bloomclock/experiment.hpp"
#include "bloomclock/metrics.hpp"
#include "bloomclock/simulation.hpp"

namespace bloomclock {

// Trace files are tab-separated, one event per line, after a config line and
// a column header:
//
//   # bloomclock-trace topology=complete n=4 m=2 k=1 pr_i=0 seed=7 ...
//   gsn pid kind event_index sender receiver vector_ts bloom_ts send_gsn
//
// Clock columns are comma-joined counters; absent optional fields are "-".
void write_trace(std::ostream& out, const ExecutionLog& log);
// Throws ParseError naming the offending line.
ExecutionLog read_trace(std::istream& in);
void persist_trace(const ExecutionLog& log, const std::filesystem::path& path);
ExecutionLog load_trace(const std::filesystem::path& path);

inline constexpr const char* kCurveHeader = "z_gsn,pr_p,pr_fp_step,pr_fp_smooth,outcome";

// Doubles are written in shortest round-trip form.
void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows);
std::vector<CurveRow> read_curve_csv(std::istream& in);

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const SliceSpec& slice);
nlohmann::json to_json(const MetricsReport& report);
nlohmann::json to_json(const MeanMetrics& mean);
nlohmann::json to_json(const RunArtifact& artifact);
nlohmann::json to_json(const std::vector<SweepCell>& cells);

// Per-seed rows plus a "mean" row; ratios rounded to three decimals.
void write_metrics_csv(std::ostream& out, const RunArtifact& artifact);
// One row per cell (failed cells carry the error text).
void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells);
void write_groups_csv(std::ostream& out, const std::vector<SweepGroup>& groups);

}  // namespace bloomclock
