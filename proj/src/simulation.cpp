#include "bloomclock/simulation.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "bloomclock/errors.hpp"

namespace bloomclock {

std::string_view to_string(Topology t) {
  switch (t) {
    case Topology::kComplete:
      return "complete";
    case Topology::kStar:
      return "star";
    case Topology::kBroadcast:
      return "broadcast";
  }
  return "?";
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::kInternal:
      return "internal";
    case EventKind::kSend:
      return "send";
    case EventKind::kReceive:
      return "receive";
  }
  return "?";
}

std::string_view to_string(ReceiveFallback f) {
  switch (f) {
    case ReceiveFallback::kSkip:
      return "skip";
    case ReceiveFallback::kSend:
      return "send";
    case ReceiveFallback::kBlock:
      return "block";
  }
  return "?";
}

Topology parse_topology(std::string_view s) {
  if (s == "complete") return Topology::kComplete;
  if (s == "star") return Topology::kStar;
  if (s == "broadcast") return Topology::kBroadcast;
  throw ConfigError("unknown topology '" + std::string(s) + "'");
}

EventKind parse_event_kind(std::string_view s) {
  if (s == "internal") return EventKind::kInternal;
  if (s == "send") return EventKind::kSend;
  if (s == "receive") return EventKind::kReceive;
  throw ConfigError("unknown event kind '" + std::string(s) + "'");
}

ReceiveFallback parse_receive_fallback(std::string_view s) {
  if (s == "skip") return ReceiveFallback::kSkip;
  if (s == "send") return ReceiveFallback::kSend;
  if (s == "block") return ReceiveFallback::kBlock;
  throw ConfigError("unknown receive fallback '" + std::string(s) + "'");
}

void ExperimentConfig::validate() const {
  if (topology == Topology::kStar) {
    if (n < 1) throw ConfigError("star topology needs at least one client");
  } else if (n < 2) {
    throw ConfigError("n must be >= 2");
  }
  if (m < 1) throw ConfigError("m must be >= 1");
  if (k < 1) throw ConfigError("k must be >= 1");
  if (!(pr_i >= 0.0 && pr_i <= 1.0)) throw ConfigError("pr_i must lie in [0, 1]");
  if (gsn_limit && *gsn_limit < 1) throw ConfigError("gsn_limit must be >= 1");
  if (messages_per_client && *messages_per_client < 1) throw ConfigError("messages_per_client must be >= 1");
}

std::uint64_t ExperimentConfig::effective_gsn_limit() const {
  return gsn_limit.value_or(static_cast<std::uint64_t>(n) * n);
}

std::uint32_t ExperimentConfig::effective_messages_per_client() const { return messages_per_client.value_or(n); }

std::uint32_t ExperimentConfig::process_count() const { return topology == Topology::kStar ? n + 1 : n; }

const EventRecord& ExecutionLog::at_gsn(std::uint64_t gsn) const {
  if (gsn < 1 || gsn > events.size()) {
    throw DomainError("gsn " + std::to_string(gsn) + " outside log of " + std::to_string(events.size()) +
                      " events");
  }
  return events[gsn - 1];
}

std::uint64_t SeededRandom::below(std::uint64_t bound) {
  // Rejection sampling removes the modulo bias.
  const std::uint64_t limit = engine_.max() - engine_.max() % bound;
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return draw % bound;
}

double SeededRandom::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

namespace {

struct ProcessState {
  VectorClock vector;
  BloomClock bloom;
  EventIndex next;
  std::vector<MessageItem> pending;
};

// Applies the clock protocol and appends one record per executed event.
class Execution {
 public:
  explicit Execution(const ExperimentConfig& config)
      : family_(config.k, config.m, config.seed) {
    log_.config = config;
    procs_.resize(config.process_count());
    for (auto& p : procs_) {
      p.vector = VectorClock(config.process_count());
      p.bloom = BloomClock(config.m);
    }
  }

  std::uint64_t gsn() const { return log_.events.size(); }
  ProcessState& process(std::uint32_t pid) { return procs_[pid]; }

  void internal(ProcessId pid) { record(pid, EventKind::kInternal, {}, {}, {}); }

  MessageItem send(ProcessId pid, std::optional<ProcessId> destination) {
    const EventRecord& e = record(pid, EventKind::kSend, pid, destination, {});
    return MessageItem{pid, destination, e.gsn, e.bloom_ts, e.vector_ts};
  }

  void receive(ProcessId pid, const MessageItem& msg) {
    ProcessState& p = procs_[pid.value];
    p.vector.merge(msg.vector_payload);
    p.bloom.merge(msg.bloom_payload);
    record(pid, EventKind::kReceive, msg.origin, pid, msg.send_gsn);
  }

  ExecutionLog take() && { return std::move(log_); }

 private:
  const EventRecord& record(ProcessId pid, EventKind kind, std::optional<ProcessId> sender,
                            std::optional<ProcessId> receiver, std::optional<std::uint64_t> send_gsn) {
    ProcessState& p = procs_[pid.value];
    ++p.next.value;
    p.vector.tick(pid);
    p.bloom.tick(family_, pid, p.next);
    EventRecord e;
    e.gsn = gsn() + 1;
    e.pid = pid;
    e.kind = kind;
    e.event_index = p.next;
    e.sender = sender;
    e.receiver = receiver;
    e.send_gsn = send_gsn;
    e.vector_ts = p.vector;
    e.bloom_ts = p.bloom;
    log_.events.push_back(std::move(e));
    return log_.events.back();
  }

  HashFamily family_;
  std::vector<ProcessState> procs_;
  ExecutionLog log_;
};

template <typename T>
T take_at(std::vector<T>& pool, std::size_t i) {
  T out = std::move(pool[i]);
  pool[i] = std::move(pool.back());
  pool.pop_back();
  return out;
}

void require_topology(const ExperimentConfig& config, Topology expected) {
  config.validate();
  if (config.topology != expected) {
    throw ConfigError("expected topology " + std::string(to_string(expected)) + ", got " +
                      std::string(to_string(config.topology)));
  }
}

}  // namespace

ExecutionLog run_complete(const ExperimentConfig& config) {
  require_topology(config, Topology::kComplete);
  const std::uint64_t limit = config.effective_gsn_limit();
  const double send_cut = config.pr_i + (1.0 - config.pr_i) / 2.0;
  SeededRandom rng(config.seed);
  Execution exec(config);
  std::vector<bool> blocked(config.n, false);
  std::uint32_t blocked_count = 0;
  std::uint64_t in_flight = 0;

  while (exec.gsn() < limit) {
    const ProcessId pid{static_cast<std::uint32_t>(rng.below(config.n))};
    auto& pending = exec.process(pid.value).pending;
    EventKind kind = EventKind::kReceive;
    if (!blocked[pid.value]) {
      const double u = rng.unit();
      kind = u < config.pr_i ? EventKind::kInternal : (u < send_cut ? EventKind::kSend : EventKind::kReceive);
    }
    if (kind == EventKind::kReceive && pending.empty()) {
      if (config.receive_fallback == ReceiveFallback::kSend) {
        kind = EventKind::kSend;
      } else {
        if (config.receive_fallback == ReceiveFallback::kBlock && !blocked[pid.value]) {
          blocked[pid.value] = true;
          ++blocked_count;
          if (blocked_count == config.n && in_flight == 0) {
            // Everyone waits on an empty network: release them all.
            std::fill(blocked.begin(), blocked.end(), false);
            blocked_count = 0;
          }
        }
        continue;
      }
    }
    if (blocked[pid.value]) {
      blocked[pid.value] = false;
      --blocked_count;
    }
    switch (kind) {
      case EventKind::kInternal:
        exec.internal(pid);
        break;
      case EventKind::kSend: {
        auto other = static_cast<std::uint32_t>(rng.below(config.n - 1));
        if (other >= pid.value) ++other;
        MessageItem msg = exec.send(pid, ProcessId{other});
        exec.process(other).pending.push_back(std::move(msg));
        ++in_flight;
        break;
      }
      case EventKind::kReceive: {
        const MessageItem msg = take_at(pending, rng.below(pending.size()));
        exec.receive(pid, msg);
        --in_flight;
        break;
      }
    }
  }
  return std::move(exec).take();
}

ExecutionLog run_star(const ExperimentConfig& config) {
  require_topology(config, Topology::kStar);
  const std::uint32_t rounds = config.effective_messages_per_client();
  const ProcessId server{config.n};
  SeededRandom rng(config.seed);
  Execution exec(config);

  enum class Phase { kIdle, kRequestInFlight, kReplyInFlight };
  struct Client {
    Phase phase = Phase::kIdle;
    std::uint32_t completed = 0;
    std::optional<MessageItem> in_flight;
  };
  std::vector<Client> clients(config.n);
  std::vector<std::uint32_t> active(config.n);
  for (std::uint32_t c = 0; c < config.n; ++c) active[c] = c;

  while (!active.empty()) {
    const std::size_t slot = rng.below(active.size());
    const ProcessId pid{active[slot]};
    Client& client = clients[pid.value];
    switch (client.phase) {
      case Phase::kIdle:
        client.in_flight = exec.send(pid, server);
        client.phase = Phase::kRequestInFlight;
        break;
      case Phase::kRequestInFlight:
        // The server handles one request atomically: receive, then reply.
        exec.receive(server, *client.in_flight);
        client.in_flight = exec.send(server, pid);
        client.phase = Phase::kReplyInFlight;
        break;
      case Phase::kReplyInFlight:
        exec.receive(pid, *client.in_flight);
        client.in_flight.reset();
        client.phase = Phase::kIdle;
        if (++client.completed == rounds) take_at(active, slot);
        break;
    }
  }
  return std::move(exec).take();
}

ExecutionLog run_broadcast(const ExperimentConfig& config) {
  require_topology(config, Topology::kBroadcast);
  const std::uint64_t limit = config.effective_gsn_limit();
  SeededRandom rng(config.seed);
  Execution exec(config);

  std::vector<bool> sent(config.n, false);
  std::vector<std::uint32_t> received(config.n, 0);
  std::vector<std::uint32_t> active(config.n);
  for (std::uint32_t p = 0; p < config.n; ++p) active[p] = p;

  while (!active.empty() && exec.gsn() < limit) {
    const std::size_t slot = rng.below(active.size());
    const ProcessId pid{active[slot]};
    auto& pending = exec.process(pid.value).pending;
    if (!sent[pid.value]) {
      const MessageItem msg = exec.send(pid, std::nullopt);
      sent[pid.value] = true;
      for (std::uint32_t d = 0; d < config.n; ++d) {
        if (d != pid.value) exec.process(d).pending.push_back(msg);
      }
    } else if (!pending.empty()) {
      const MessageItem msg = take_at(pending, rng.below(pending.size()));
      exec.receive(pid, msg);
      if (++received[pid.value] == config.n - 1) take_at(active, slot);
    }
  }
  return std::move(exec).take();
}

ExecutionLog run_simulation(const ExperimentConfig& config) {
  switch (config.topology) {
    case Topology::kComplete:
      return run_complete(config);
    case Topology::kStar:
      return run_star(config);
    case Topology::kBroadcast:
      return run_broadcast(config);
  }
  throw ConfigError("unknown topology");
}

std::optional<std::uint64_t> first_replay_mismatch(const ExecutionLog& log) {
  const ExperimentConfig& config = log.config;
  const HashFamily family(config.k, config.m, config.seed);
  const std::uint32_t width = config.process_count();
  std::vector<VectorClock> vectors(width, VectorClock(width));
  std::vector<BloomClock> blooms(width, BloomClock(config.m));
  std::vector<EventIndex> next(width);

  for (const EventRecord& e : log.events) {
    const std::uint32_t p = e.pid.value;
    if (p >= width) return e.gsn;
    if (e.kind == EventKind::kReceive) {
      if (!e.send_gsn || *e.send_gsn >= e.gsn) return e.gsn;
      const EventRecord& s = log.at_gsn(*e.send_gsn);
      if (s.kind != EventKind::kSend) return e.gsn;
      vectors[p] = vector_merge(vectors[p], s.vector_ts);
      blooms[p] = bloom_merge(blooms[p], s.bloom_ts);
    }
    ++next[p].value;
    vectors[p] = vector_tick(vectors[p], e.pid);
    blooms[p] = bloom_tick(blooms[p], e.pid, next[p], family);
    if (e.event_index != next[p] || e.vector_ts != vectors[p] || e.bloom_ts != blooms[p]) return e.gsn;
  }
  return std::nullopt;
}

}  // namespace bloomclock
