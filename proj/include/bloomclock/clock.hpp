#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace bloomclock {

using Counter = std::uint64_t;

struct ProcessId {
  std::uint32_t value = 0;
  friend auto operator<=>(ProcessId, ProcessId) = default;
};

// Per-process event sequence number. The first event at a process is x = 1;
// x = 0 is the all-zero initial state.
struct EventIndex {
  std::uint64_t value = 0;
  friend auto operator<=>(EventIndex, EventIndex) = default;
};

// k index derivations over a width-m clock, keyed by a 64-bit seed.
//
// Indices come from one keyed 64-bit hash of (pid, x) split into two halves
// and combined by double hashing: index_i = (h1 + i * h2) mod m, h2 odd.
// The k indices form a multiset; duplicates are kept.
class HashFamily {
 public:
  HashFamily(std::size_t k, std::size_t m, std::uint64_t seed);

  std::size_t k() const noexcept { return k_; }
  std::size_t m() const noexcept { return m_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::vector<std::size_t> derive(ProcessId pid, EventIndex x) const;

  template <typename Fn>
  void for_each_index(ProcessId pid, EventIndex x, Fn&& fn) const {
    const auto [base, step] = base_and_step(pid, x);
    std::size_t index = base;
    for (std::size_t i = 0; i < k_; ++i) {
      fn(index);
      index = (index + step) % m_;
    }
  }

 private:
  struct BaseStep {
    std::size_t base;
    std::size_t step;
  };
  BaseStep base_and_step(ProcessId pid, EventIndex x) const noexcept;

  std::size_t k_;
  std::size_t m_;
  std::uint64_t seed_;
};

// Counting-Bloom-filter timestamp of width m.
class BloomClock {
 public:
  BloomClock() = default;
  explicit BloomClock(std::size_t width) : counters_(width, 0) {}
  explicit BloomClock(std::vector<Counter> counters) : counters_(std::move(counters)) {}
  BloomClock(std::initializer_list<Counter> counters) : counters_(counters) {}

  std::size_t width() const noexcept { return counters_.size(); }
  std::span<const Counter> counters() const noexcept { return counters_; }
  Counter operator[](std::size_t i) const { return counters_[i]; }

  // Local tick: add one to every derived index (k increments in total).
  void tick(const HashFamily& family, ProcessId pid, EventIndex x);
  // Pointwise maximum with another clock of the same width.
  void merge(const BloomClock& other);

  friend bool operator==(const BloomClock&, const BloomClock&) = default;

 private:
  std::vector<Counter> counters_;
};

BloomClock bloom_tick(BloomClock clock, ProcessId pid, EventIndex x, const HashFamily& family);
BloomClock bloom_merge(const BloomClock& a, const BloomClock& b);
// Causality test: true iff bz[i] >= by[i] for every i, i.e. "declare y -> z".
bool bloom_leq(const BloomClock& by, const BloomClock& bz);
Counter bloom_sum(const BloomClock& clock);

// Exact causality oracle.
class VectorClock {
 public:
  VectorClock() = default;
  explicit VectorClock(std::size_t width) : counters_(width, 0) {}
  explicit VectorClock(std::vector<Counter> counters) : counters_(std::move(counters)) {}
  VectorClock(std::initializer_list<Counter> counters) : counters_(counters) {}

  std::size_t width() const noexcept { return counters_.size(); }
  std::span<const Counter> counters() const noexcept { return counters_; }
  Counter operator[](std::size_t i) const { return counters_[i]; }

  void tick(ProcessId pid);
  void merge(const VectorClock& other);

  friend bool operator==(const VectorClock&, const VectorClock&) = default;

 private:
  std::vector<Counter> counters_;
};

VectorClock vector_tick(VectorClock clock, ProcessId pid);
VectorClock vector_merge(const VectorClock& a, const VectorClock& b);
// vy <= vz componentwise and vy != vz.
bool vector_happened_before(const VectorClock& vy, const VectorClock& vz);

}  // namespace bloomclock
