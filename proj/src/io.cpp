#include "bloomclock/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <system_error>

#include "bloomclock/errors.hpp"

namespace bloomclock {
namespace {

constexpr std::string_view kTraceMagic = "# bloomclock-trace";
constexpr std::string_view kTraceColumns =
    "gsn\tpid\tkind\tevent_index\tsender\treceiver\tvector_ts\tbloom_ts\tsend_gsn";

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t pos = s.find(sep, begin);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(begin));
      return out;
    }
    out.push_back(s.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

template <typename T>
T parse_number(std::string_view s, std::size_t line, std::string_view field) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(line, "bad " + std::string(field) + " '" + std::string(s) + "'");
  }
  return value;
}

template <typename T>
std::optional<T> parse_optional(std::string_view s, std::size_t line, std::string_view field) {
  if (s == "-") return std::nullopt;
  return parse_number<T>(s, line, field);
}

std::vector<Counter> parse_counters(std::string_view s, std::size_t line, std::string_view field) {
  std::vector<Counter> out;
  if (s.empty()) return out;
  for (std::string_view part : split(s, ',')) out.push_back(parse_number<Counter>(part, line, field));
  return out;
}

void write_counters(std::ostream& out, std::span<const Counter> counters) {
  for (std::size_t i = 0; i < counters.size(); ++i) {
    if (i) out << ',';
    out << counters[i];
  }
}

template <typename T>
void write_optional(std::ostream& out, const std::optional<T>& v) {
  if (v) {
    out << *v;
  } else {
    out << '-';
  }
}

void write_optional(std::ostream& out, const std::optional<ProcessId>& v) {
  if (v) {
    out << v->value;
  } else {
    out << '-';
  }
}

ExperimentConfig parse_config_line(std::string_view line) {
  ExperimentConfig config;
  const std::size_t ln = 1;
  for (std::string_view item : split(line.substr(kTraceMagic.size()), ' ')) {
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError(ln, "bad config item '" + std::string(item) + "'");
    const std::string_view key = item.substr(0, eq);
    const std::string_view val = item.substr(eq + 1);
    try {
      if (key == "topology") {
        config.topology = parse_topology(val);
      } else if (key == "n") {
        config.n = parse_number<std::uint32_t>(val, ln, key);
      } else if (key == "m") {
        config.m = parse_number<std::uint32_t>(val, ln, key);
      } else if (key == "k") {
        config.k = parse_number<std::uint32_t>(val, ln, key);
      } else if (key == "pr_i") {
        config.pr_i = parse_number<double>(val, ln, key);
      } else if (key == "seed") {
        config.seed = parse_number<std::uint64_t>(val, ln, key);
      } else if (key == "gsn_limit") {
        config.gsn_limit = parse_optional<std::uint64_t>(val, ln, key);
      } else if (key == "messages_per_client") {
        config.messages_per_client = parse_optional<std::uint32_t>(val, ln, key);
      } else if (key == "receive_fallback") {
        config.receive_fallback = parse_receive_fallback(val);
      } else {
        throw ParseError(ln, "unknown config key '" + std::string(key) + "'");
      }
    } catch (const ConfigError& e) {
      throw ParseError(ln, e.what());
    }
  }
  return config;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_trace(std::ostream& out, const ExecutionLog& log) {
  const ExperimentConfig& c = log.config;
  out << kTraceMagic << " topology=" << to_string(c.topology) << " n=" << c.n << " m=" << c.m << " k=" << c.k
      << " pr_i=" << format_double(c.pr_i) << " seed=" << c.seed << " gsn_limit=";
  write_optional(out, c.gsn_limit);
  out << " messages_per_client=";
  write_optional(out, c.messages_per_client);
  out << " receive_fallback=" << to_string(c.receive_fallback) << '\n' << kTraceColumns << '\n';
  for (const EventRecord& e : log.events) {
    out << e.gsn << '\t' << e.pid.value << '\t' << to_string(e.kind) << '\t' << e.event_index.value << '\t';
    write_optional(out, e.sender);
    out << '\t';
    write_optional(out, e.receiver);
    out << '\t';
    write_counters(out, e.vector_ts.counters());
    out << '\t';
    write_counters(out, e.bloom_ts.counters());
    out << '\t';
    write_optional(out, e.send_gsn);
    out << '\n';
  }
}

ExecutionLog read_trace(std::istream& in) {
  ExecutionLog log;
  std::string line;
  if (!std::getline(in, line) || !std::string_view(line).starts_with(kTraceMagic)) {
    throw ParseError(1, "missing trace config line");
  }
  log.config = parse_config_line(line);
  if (!std::getline(in, line) || line != kTraceColumns) throw ParseError(2, "missing trace column header");

  std::size_t ln = 2;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 9) {
      throw ParseError(ln, "expected 9 tab-separated fields, found " + std::to_string(f.size()));
    }
    EventRecord e;
    e.gsn = parse_number<std::uint64_t>(f[0], ln, "gsn");
    e.pid = ProcessId{parse_number<std::uint32_t>(f[1], ln, "pid")};
    try {
      e.kind = parse_event_kind(f[2]);
    } catch (const ConfigError& err) {
      throw ParseError(ln, err.what());
    }
    e.event_index = EventIndex{parse_number<std::uint64_t>(f[3], ln, "event_index")};
    if (auto s = parse_optional<std::uint32_t>(f[4], ln, "sender")) e.sender = ProcessId{*s};
    if (auto r = parse_optional<std::uint32_t>(f[5], ln, "receiver")) e.receiver = ProcessId{*r};
    e.vector_ts = VectorClock(parse_counters(f[6], ln, "vector_ts"));
    e.bloom_ts = BloomClock(parse_counters(f[7], ln, "bloom_ts"));
    e.send_gsn = parse_optional<std::uint64_t>(f[8], ln, "send_gsn");
    if (e.gsn != log.events.size() + 1) {
      throw ParseError(ln, "gsn " + std::to_string(e.gsn) + " out of sequence");
    }
    log.events.push_back(std::move(e));
  }
  return log;
}

void persist_trace(const ExecutionLog& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_trace(out, log);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

ExecutionLog load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_trace(in);
}

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << kCurveHeader << '\n';
  for (const CurveRow& r : rows) {
    out << r.z_gsn << ',' << format_double(r.pr_p) << ',' << format_double(r.pr_fp_step) << ','
        << format_double(r.pr_fp_smooth) << ',' << to_string(r.outcome) << '\n';
  }
}

std::vector<CurveRow> read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCurveHeader) throw ParseError(1, "missing curve header");
  std::vector<CurveRow> rows;
  std::size_t ln = 1;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 5) throw ParseError(ln, "expected 5 comma-separated fields");
    CurveRow r;
    r.z_gsn = parse_number<std::uint64_t>(f[0], ln, "z_gsn");
    r.pr_p = parse_number<double>(f[1], ln, "pr_p");
    r.pr_fp_step = parse_number<double>(f[2], ln, "pr_fp_step");
    r.pr_fp_smooth = parse_number<double>(f[3], ln, "pr_fp_smooth");
    try {
      r.outcome = parse_outcome(f[4]);
    } catch (const DomainError& e) {
      throw ParseError(ln, e.what());
    }
    rows.push_back(r);
  }
  return rows;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j{{"topology", to_string(c.topology)},
                   {"n", c.n},
                   {"m", c.m},
                   {"k", c.k},
                   {"pr_i", c.pr_i},
                   {"seed", c.seed},
                   {"receive_fallback", to_string(c.receive_fallback)}};
  if (c.topology == Topology::kStar) {
    j["messages_per_client"] = c.effective_messages_per_client();
  } else {
    j["gsn_limit"] = c.effective_gsn_limit();
  }
  return j;
}

nlohmann::json to_json(const SliceSpec& s) {
  nlohmann::json j{{"stride", s.stride}};
  j["start_gsn"] = s.start_gsn ? nlohmann::json(*s.start_gsn) : nlohmann::json("10n");
  j["end_gsn"] = s.end_gsn ? nlohmann::json(*s.end_gsn) : nlohmann::json("last");
  return j;
}

nlohmann::json to_json(const MetricsReport& r) {
  return nlohmann::json{{"tp", r.counts.tp},
                        {"fp", r.counts.fp},
                        {"tn", r.counts.tn},
                        {"fn", r.counts.fn},
                        {"precision", r.precision},
                        {"accuracy", r.accuracy},
                        {"recall", r.recall},
                        {"fpr", r.fpr},
                        {"alpha", r.alpha},
                        {"sentinels",
                         {{"precision", r.precision_sentinel},
                          {"recall", r.recall_sentinel},
                          {"fpr", r.fpr_sentinel}}}};
}

nlohmann::json to_json(const MeanMetrics& m) {
  return nlohmann::json{{"precision", m.precision},
                        {"accuracy", m.accuracy},
                        {"recall", m.recall},
                        {"fpr", m.fpr},
                        {"alpha", m.alpha}};
}

nlohmann::json to_json(const RunArtifact& a) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : a.runs) {
    nlohmann::json j = to_json(r.report);
    j["seed"] = r.seed;
    runs.push_back(std::move(j));
  }
  nlohmann::json j{{"config", to_json(a.config)}, {"slice", to_json(a.slice)}, {"runs", runs},
                   {"mean", to_json(a.mean)}};
  if (a.trace_path) j["trace_path"] = *a.trace_path;
  if (a.curve_path) j["curve_path"] = *a.curve_path;
  return j;
}

nlohmann::json to_json(const std::vector<SweepCell>& cells) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& cell : cells) {
    nlohmann::json j{{"index", cell.index}, {"m_setting", cell.width.label()}};
    if (cell.artifact) {
      j["artifact"] = to_json(*cell.artifact);
    } else {
      j["config"] = to_json(cell.config);
      j["error"] = cell.error;
    }
    out.push_back(std::move(j));
  }
  return out;
}

void write_metrics_csv(std::ostream& out, const RunArtifact& a) {
  out << "seed,tp,fp,tn,fn,precision,accuracy,recall,fpr,alpha\n";
  for (const auto& r : a.runs) {
    const auto& m = r.report;
    out << r.seed << ',' << m.counts.tp << ',' << m.counts.fp << ',' << m.counts.tn << ',' << m.counts.fn << ','
        << round3(m.precision) << ',' << round3(m.accuracy) << ',' << round3(m.recall) << ',' << round3(m.fpr)
        << ',' << round3(m.alpha) << '\n';
  }
  out << "mean,,,,," << round3(a.mean.precision) << ',' << round3(a.mean.accuracy) << ','
      << round3(a.mean.recall) << ',' << round3(a.mean.fpr) << ',' << round3(a.mean.alpha) << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells) {
  out << "cell,topology,n,m_setting,m,k,pr_i,runs,precision,accuracy,recall,fpr,alpha,error\n";
  for (const auto& cell : cells) {
    const auto& c = cell.config;
    out << cell.index << ',' << to_string(c.topology) << ',' << c.n << ',' << cell.width.label() << ',' << c.m
        << ',' << c.k << ',' << format_double(c.pr_i) << ',';
    if (cell.artifact) {
      const auto& m = cell.artifact->mean;
      out << cell.artifact->runs.size() << ',' << round3(m.precision) << ',' << round3(m.accuracy) << ','
          << round3(m.recall) << ',' << round3(m.fpr) << ',' << round3(m.alpha) << ",\n";
    } else {
      std::string msg = cell.error;
      for (char& ch : msg) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      out << "0,,,,,," << msg << '\n';
    }
  }
}

void write_groups_csv(std::ostream& out, const std::vector<SweepGroup>& groups) {
  out << "n,pr_i,m_setting,k,cells,precision,accuracy,recall,fpr,alpha\n";
  for (const auto& g : groups) {
    out << g.n << ',' << format_double(g.pr_i) << ',' << g.m_label.value_or("avg") << ',';
    if (g.k) {
      out << *g.k;
    } else {
      out << "avg";
    }
    out << ',' << g.cells << ',' << round3(g.mean.precision) << ',' << round3(g.mean.accuracy) << ','
        << round3(g.mean.recall) << ',' << round3(g.mean.fpr) << ',' << round3(g.mean.alpha) << '\n';
  }
}

}  // namespace bloomclock
