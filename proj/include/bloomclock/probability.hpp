#pragma once

#include <cstdint>

#include "bloomclock/clock.hpp"

namespace bloomclock {

// A value in [0, 1]. Construction clamps rounding slack of up to 1e-12 and
// rejects anything further out.
class Probability {
 public:
  static constexpr double kSlack = 1e-12;

  constexpr Probability() = default;
  explicit Probability(double value);

  constexpr double value() const noexcept { return value_; }
  constexpr operator double() const noexcept { return value_; }

 private:
  double value_ = 0.0;
};

// Trial counts at or below this use the exact binomial sum; above it the
// Poisson / incomplete-gamma approximation.
inline constexpr std::uint64_t kExactCutoff = 1024;

enum class ThresholdMethod { kAuto, kExact, kPoisson };

// Binomial(q, 1/m) pmf at l, evaluated in log space.
Probability binom_pmf(std::uint64_t l, std::uint64_t q, std::uint64_t m);

// P(X < c) for X ~ Binomial(q, 1/m): the chance that a position receives fewer
// than c of q uniformly hashed increments.
Probability count_threshold_cdf(std::uint64_t c, std::uint64_t q, std::uint64_t m,
                                ThresholdMethod method = ThresholdMethod::kAuto);

// P(X <= c - 1) for X ~ Poisson(lambda), i.e. Q(c, lambda).
Probability poisson_cdf_via_gamma(std::uint64_t c, double lambda);

// Regularized incomplete gamma functions, a > 0, x >= 0. Series for
// x < a + 1, Lentz continued fraction otherwise.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Probability that bz dominates by when bloom_sum(bz) increments are spread
// uniformly over the m positions.
Probability pr_positive(const BloomClock& by, const BloomClock& bz,
                        ThresholdMethod method = ThresholdMethod::kAuto);

// 1 if bloom_leq(by, bz), else 0.
int pr_delta(const BloomClock& by, const BloomClock& bz);

struct ProbabilityReport {
  Probability pr_p;
  int pr_delta_p = 0;
  // pr_delta used as an exact step.
  Probability pr_fp_step;
  Probability pr_tp_step;
  Probability pr_tn_step;
  // pr_p used in place of pr_delta.
  Probability pr_fp_smooth;
  Probability pr_tp_smooth;
  Probability pr_tn_smooth;
};

ProbabilityReport classify_probabilities(const BloomClock& by, const BloomClock& bz,
                                         ThresholdMethod method = ThresholdMethod::kAuto);

}  // namespace bloomclock
