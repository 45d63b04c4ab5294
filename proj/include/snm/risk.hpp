#pragma once

// Monte Carlo estimates of the per-hypothesis MLE risk P_j[T(y) != j].
//
// Trial t of hypothesis j draws from stream (seed, j * N + t), so estimates
// are identical for any thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "snm/design_strategy.hpp"
#include "snm/errors.hpp"
#include "snm/family.hpp"
#include "snm/parallel.hpp"
#include "snm/rng.hpp"
#include "snm/sampling.hpp"

namespace snm {

inline constexpr double kWilsonZ95 = 1.959963984540054;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Wilson score interval for `errors` successes out of `trials`.
inline Interval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z = kWilsonZ95) {
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::clamp(std::min(center - half, p), 0.0, 1.0), std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

struct HypothesisRisk {
  std::uint64_t hypothesis = 0;
  std::uint64_t errors = 0;
  double phat = 0.0;
  Interval ci;
};

struct RiskEstimate {
  std::uint64_t trials = 0;  // per hypothesis
  std::uint64_t seed = 0;
  bool isotropic = true;
  std::vector<HypothesisRisk> per_hypothesis;
  double max_risk = 0.0;
  std::uint64_t argmax = 0;

  double min_success() const { return 1.0 - max_risk; }
};

struct RiskOptions {
  std::uint64_t max_total_trials = 200'000'000;
  std::size_t threads = thread_count();
};

inline RiskEstimate estimate_risk(const Family& family, const std::optional<DesignStrategy>& design,
                                  std::uint64_t trials, std::uint64_t seed, const RiskOptions& options = {}) {
  detail::require(trials >= 1, "trials per hypothesis must be at least 1");
  detail::require_design_dimension(design, family.dimension());
  const std::uint64_t m = family.size();
  if (m > kMaxMaterializedHypotheses) throw CapabilityError("family too large to decode: M=" + std::to_string(m));
  if (trials > options.max_total_trials / m)
    throw CapabilityError("risk estimate needs " + std::to_string(trials) + " x " + std::to_string(m) +
                          " trials, above the budget of " + std::to_string(options.max_total_trials));

  const MleDecoder decoder(family, design);
  RiskEstimate est;
  est.trials = trials;
  est.seed = seed;
  est.isotropic = !design.has_value();
  est.per_hypothesis.resize(m);

  parallel_for(
      m,
      [&](std::size_t j) {
        const auto mean = decoder.vectors().row(j);
        std::vector<double> y(mean.size());
        std::uint64_t errors = 0;
        for (std::uint64_t t = 0; t < trials; ++t) {
          RngStream rng({seed, j * trials + t});
          draw_observation(mean, design, rng, y);
          if (decoder.decode(y) != j) ++errors;
        }
        auto& h = est.per_hypothesis[j];
        h.hypothesis = j;
        h.errors = errors;
        h.phat = static_cast<double>(errors) / static_cast<double>(trials);
        h.ci = wilson_interval(errors, trials);
      },
      options.threads);

  for (const auto& h : est.per_hypothesis)
    if (h.phat > est.max_risk) {
      est.max_risk = h.phat;
      est.argmax = h.hypothesis;
    }
  return est;
}

// Spread of the per-hypothesis risks against binomial noise. A flat
// landscape is what an exactly symmetric family produces; this is a
// diagnostic, not a proof.
struct Flatness {
  double spread = 0.0;     // max_j phat_j - min_j phat_j
  double pooled_se = 0.0;  // sqrt(2 pbar (1 - pbar) / N): SE of a difference of two frequencies
  double threshold = 0.0;  // 4 * pooled_se
  bool pass = true;
};

inline Flatness risk_landscape_flatness(const RiskEstimate& est, double se_multiple = 4.0) {
  Flatness f;
  if (est.per_hypothesis.size() < 2) return f;
  double lo = 1.0, hi = 0.0, total = 0.0;
  for (const auto& h : est.per_hypothesis) {
    lo = std::min(lo, h.phat);
    hi = std::max(hi, h.phat);
    total += h.phat;
  }
  const double pbar = total / static_cast<double>(est.per_hypothesis.size());
  f.spread = hi - lo;
  f.pooled_se = std::sqrt(2.0 * pbar * (1.0 - pbar) / static_cast<double>(est.trials));
  f.threshold = se_multiple * f.pooled_se;
  f.pass = f.spread <= f.threshold;
  return f;
}

}  // namespace snm
