#include "bloomclock/clock.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "bloomclock/errors.hpp"

namespace bloomclock {
namespace {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void check_width(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw ConfigError(std::string(op) + ": width mismatch (" + std::to_string(a) + " vs " +
                      std::to_string(b) + ")");
  }
}

void increment(Counter& c) {
  if (c == std::numeric_limits<Counter>::max()) throw NumericError("clock counter overflow");
  ++c;
}

}  // namespace

HashFamily::HashFamily(std::size_t k, std::size_t m, std::uint64_t seed) : k_(k), m_(m), seed_(seed) {
  if (k == 0) throw ConfigError("hash family: k must be >= 1");
  if (m == 0) throw ConfigError("hash family: m must be >= 1");
}

HashFamily::BaseStep HashFamily::base_and_step(ProcessId pid, EventIndex x) const noexcept {
  const std::uint64_t key = mix64(seed_ + 0x9E3779B97F4A7C15ULL);
  const std::uint64_t h1 = mix64(mix64(key ^ pid.value) ^ x.value);
  const std::uint64_t h2 = mix64(h1 ^ 0xD6E8FEB86659FD93ULL) | 1ULL;
  return {static_cast<std::size_t>(h1 % m_), static_cast<std::size_t>(h2 % m_)};
}

std::vector<std::size_t> HashFamily::derive(ProcessId pid, EventIndex x) const {
  std::vector<std::size_t> out;
  out.reserve(k_);
  for_each_index(pid, x, [&](std::size_t i) { out.push_back(i); });
  return out;
}

void BloomClock::tick(const HashFamily& family, ProcessId pid, EventIndex x) {
  check_width(width(), family.m(), "bloom_tick");
  family.for_each_index(pid, x, [&](std::size_t i) { increment(counters_[i]); });
}

void BloomClock::merge(const BloomClock& other) {
  check_width(width(), other.width(), "bloom_merge");
  for (std::size_t i = 0; i < counters_.size(); ++i) {
    counters_[i] = std::max(counters_[i], other.counters_[i]);
  }
}

BloomClock bloom_tick(BloomClock clock, ProcessId pid, EventIndex x, const HashFamily& family) {
  clock.tick(family, pid, x);
  return clock;
}

BloomClock bloom_merge(const BloomClock& a, const BloomClock& b) {
  BloomClock out = a;
  out.merge(b);
  return out;
}

bool bloom_leq(const BloomClock& by, const BloomClock& bz) {
  check_width(by.width(), bz.width(), "bloom_leq");
  const auto y = by.counters();
  const auto z = bz.counters();
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (z[i] < y[i]) return false;
  }
  return true;
}

Counter bloom_sum(const BloomClock& clock) {
  Counter total = 0;
  for (Counter c : clock.counters()) {
    if (c > std::numeric_limits<Counter>::max() - total) throw NumericError("bloom_sum overflow");
    total += c;
  }
  return total;
}

void VectorClock::tick(ProcessId pid) {
  if (pid.value >= counters_.size()) {
    throw ConfigError("vector_tick: pid " + std::to_string(pid.value) + " outside width " +
                      std::to_string(counters_.size()));
  }
  increment(counters_[pid.value]);
}

void VectorClock::merge(const VectorClock& other) {
  check_width(width(), other.width(), "vector_merge");
  for (std::size_t i = 0; i < counters_.size(); ++i) {
    counters_[i] = std::max(counters_[i], other.counters_[i]);
  }
}

VectorClock vector_tick(VectorClock clock, ProcessId pid) {
  clock.tick(pid);
  return clock;
}

VectorClock vector_merge(const VectorClock& a, const VectorClock& b) {
  VectorClock out = a;
  out.merge(b);
  return out;
}

bool vector_happened_before(const VectorClock& vy, const VectorClock& vz) {
  check_width(vy.width(), vz.width(), "vector_happened_before");
  const auto y = vy.counters();
  const auto z = vz.counters();
  bool strictly_less_somewhere = false;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] > z[i]) return false;
    if (y[i] < z[i]) strictly_less_somewhere = true;
  }
  return strictly_less_somewhere;
}

}  // namespace bloomclock
