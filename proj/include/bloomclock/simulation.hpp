#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "bloomclock/clock.hpp"

namespace bloomclock {

enum class Topology { kComplete, kStar, kBroadcast };
enum class EventKind { kInternal, kSend, kReceive };

// What a process in the complete topology does when it draws a receive but
// has no pending message.
enum class ReceiveFallback {
  kSkip,  // no event; the scheduler moves on
  kSend,  // execute a send instead
  kBlock,  // wait; the process's next turns only try to receive
};

std::string_view to_string(Topology t);
std::string_view to_string(EventKind k);
std::string_view to_string(ReceiveFallback f);
Topology parse_topology(std::string_view s);
EventKind parse_event_kind(std::string_view s);
ReceiveFallback parse_receive_fallback(std::string_view s);

struct ExperimentConfig {
  Topology topology = Topology::kComplete;
  // Process count; for the star topology this is the client count and the
  // server is an extra process with id n.
  std::uint32_t n = 2;
  std::uint32_t m = 1;
  std::uint32_t k = 1;
  double pr_i = 0.0;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> gsn_limit;            // default n^2
  std::optional<std::uint32_t> messages_per_client;  // star only, default n
  ReceiveFallback receive_fallback = ReceiveFallback::kSkip;

  // Throws ConfigError.
  void validate() const;
  std::uint64_t effective_gsn_limit() const;
  std::uint32_t effective_messages_per_client() const;
  // Width of the vector clocks: n, or n + 1 with the star server.
  std::uint32_t process_count() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct EventRecord {
  std::uint64_t gsn = 0;
  ProcessId pid;
  EventKind kind = EventKind::kInternal;
  EventIndex event_index;
  std::optional<ProcessId> sender;
  std::optional<ProcessId> receiver;
  // GSN of the matching send, on receive events.
  std::optional<std::uint64_t> send_gsn;
  VectorClock vector_ts;
  BloomClock bloom_ts;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct MessageItem {
  ProcessId origin;
  std::optional<ProcessId> destination;  // empty for a broadcast
  std::uint64_t send_gsn = 0;
  BloomClock bloom_payload;
  VectorClock vector_payload;
};

struct ExecutionLog {
  ExperimentConfig config;
  std::vector<EventRecord> events;  // events[g - 1] has gsn g

  // Throws DomainError for a GSN outside [1, size].
  const EventRecord& at_gsn(std::uint64_t gsn) const;

  friend bool operator==(const ExecutionLog&, const ExecutionLog&) = default;
};

ExecutionLog run_complete(const ExperimentConfig& config);
ExecutionLog run_star(const ExperimentConfig& config);
ExecutionLog run_broadcast(const ExperimentConfig& config);
// Dispatches on config.topology.
ExecutionLog run_simulation(const ExperimentConfig& config);

// Rebuilds every timestamp from kinds and message linkage alone and reports
// the first GSN whose recorded clocks differ, or nullopt when all match.
std::optional<std::uint64_t> first_replay_mismatch(const ExecutionLog& log);

// Deterministic draws on top of std::mt19937_64, whose output sequence is
// fixed by the standard. The std distributions are not, so they are avoided.
class SeededRandom {
 public:
  explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, bound), bound >= 1.
  std::uint64_t below(std::uint64_t bound);
  // Uniform in [0, 1) with 53 random bits.
  double unit();

 private:
  std::mt19937_64 engine_;
};

}  // namespace bloomclock
