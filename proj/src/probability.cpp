#include "bloomclock/probability.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bloomclock/errors.hpp"

namespace bloomclock {
namespace {

constexpr int kMaxIterations = 100000;
constexpr double kEpsilon = 1e-15;
constexpr double kTiny = 1e-300;

double log_binom_pmf(std::uint64_t l, std::uint64_t q, std::uint64_t m) {
  const double dq = static_cast<double>(q);
  const double dl = static_cast<double>(l);
  const double p = 1.0 / static_cast<double>(m);
  return std::lgamma(dq + 1.0) - std::lgamma(dl + 1.0) - std::lgamma(dq - dl + 1.0) + dl * std::log(p) +
         (dq - dl) * std::log1p(-p);
}

bool use_exact(std::uint64_t q, ThresholdMethod method) {
  switch (method) {
    case ThresholdMethod::kExact:
      return true;
    case ThresholdMethod::kPoisson:
      return false;
    case ThresholdMethod::kAuto:
      break;
  }
  return q <= kExactCutoff;
}

// Sum of pmf over [lo, hi], both inclusive, hi <= q.
double binom_mass(std::uint64_t lo, std::uint64_t hi, std::uint64_t q, std::uint64_t m) {
  double total = 0.0;
  for (std::uint64_t l = lo; l <= hi; ++l) total += std::exp(log_binom_pmf(l, q, m));
  return total;
}

struct Split {
  double below;  // P(X < c)
  double at_or_above;  // P(X >= c)
};

// Both tails of the threshold split. Each side is computed directly where it
// is the small one so that products of survivals keep precision.
Split threshold_split(std::uint64_t c, std::uint64_t q, std::uint64_t m, ThresholdMethod method) {
  if (c == 0) return {0.0, 1.0};
  if (c > q) return {1.0, 0.0};
  if (m == 1) return {0.0, 1.0};  // every increment lands on the single position, X = q >= c
  if (use_exact(q, method)) {
    const double mean = static_cast<double>(q) / static_cast<double>(m);
    if (static_cast<double>(c) <= mean) {
      const double below = binom_mass(0, c - 1, q, m);
      return {below, 1.0 - below};
    }
    const double above = binom_mass(c, q, q, m);
    return {1.0 - above, above};
  }
  const double lambda = static_cast<double>(q) / static_cast<double>(m);
  const double a = static_cast<double>(c);
  if (lambda < a + 1.0) {
    const double above = regularized_gamma_p(a, lambda);
    return {1.0 - above, above};
  }
  const double below = regularized_gamma_q(a, lambda);
  return {below, 1.0 - below};
}

double gamma_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  double ap = a;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEpsilon) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw NumericError("incomplete gamma series did not converge (a=" + std::to_string(a) +
                     ", x=" + std::to_string(x) + ")");
}

double gamma_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEpsilon) {
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
  }
  throw NumericError("incomplete gamma continued fraction did not converge (a=" + std::to_string(a) +
                     ", x=" + std::to_string(x) + ")");
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || !std::isfinite(a) || !std::isfinite(x)) {
    throw DomainError("incomplete gamma requires a > 0 and x >= 0");
  }
}

}  // namespace

Probability::Probability(double value) {
  if (std::isnan(value) || value < -kSlack || value > 1.0 + kSlack) {
    throw NumericError("probability out of range: " + std::to_string(value));
  }
  value_ = value < 0.0 ? 0.0 : (value > 1.0 ? 1.0 : value);
}

double regularized_gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_continued_fraction(a, x);
}

Probability binom_pmf(std::uint64_t l, std::uint64_t q, std::uint64_t m) {
  if (m == 0) throw DomainError("binom_pmf: m must be >= 1");
  if (l > q) throw DomainError("binom_pmf: l > q");
  if (m == 1) return Probability(l == q ? 1.0 : 0.0);
  return Probability(std::exp(log_binom_pmf(l, q, m)));
}

Probability count_threshold_cdf(std::uint64_t c, std::uint64_t q, std::uint64_t m, ThresholdMethod method) {
  if (m == 0) throw DomainError("count_threshold_cdf: m must be >= 1");
  return Probability(threshold_split(c, q, m, method).below);
}

Probability poisson_cdf_via_gamma(std::uint64_t c, double lambda) {
  if (c == 0) throw DomainError("poisson_cdf_via_gamma: c must be >= 1");
  if (!(lambda >= 0.0)) throw DomainError("poisson_cdf_via_gamma: lambda must be >= 0");
  return Probability(regularized_gamma_q(static_cast<double>(c), lambda));
}

Probability pr_positive(const BloomClock& by, const BloomClock& bz, ThresholdMethod method) {
  if (by.width() != bz.width()) throw ConfigError("pr_positive: width mismatch");
  const std::uint64_t m = by.width();
  const std::uint64_t q = bloom_sum(bz);
  double log_product = 0.0;
  for (Counter c : by.counters()) {
    const double survival = threshold_split(c, q, m, method).at_or_above;
    if (survival <= 0.0) return Probability(0.0);
    log_product += std::log(survival);
  }
  return Probability(std::exp(log_product));
}

int pr_delta(const BloomClock& by, const BloomClock& bz) { return bloom_leq(by, bz) ? 1 : 0; }

ProbabilityReport classify_probabilities(const BloomClock& by, const BloomClock& bz, ThresholdMethod method) {
  const double p = pr_positive(by, bz, method);
  const int delta = pr_delta(by, bz);
  ProbabilityReport r;
  r.pr_p = Probability(p);
  r.pr_delta_p = delta;
  r.pr_fp_step = Probability((1.0 - p) * delta);
  r.pr_tp_step = Probability(p * delta);
  r.pr_tn_step = Probability(1.0 - delta);
  r.pr_fp_smooth = Probability((1.0 - p) * p);
  r.pr_tp_smooth = Probability(p * p);
  r.pr_tn_smooth = Probability(1.0 - p);
  return r;
}

}  // namespace bloomclock
