#pragma once

// Two-phase interactive bicluster recovery.
//
// Phase 1 probes uniformly random matrix entries (with replacement) at energy
// b until one reads above mu/2, for at most T probes. Phase 2 measures the
// full row and column through that entry (2d measurements at energy b) and
// thresholds them at mu/2; when the threshold does not return exactly k
// rows (or columns) the k largest readings are taken instead.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "snm/edf.hpp"
#include "snm/errors.hpp"
#include "snm/parallel.hpp"
#include "snm/risk.hpp"
#include "snm/rng.hpp"
#include "snm/zoo.hpp"

namespace snm {

struct AdaptiveParams {
  std::size_t d = 0;
  std::size_t k = 0;
  double mu = 0.0;
  double tau = 0.0;
  double delta = 0.1;

  void validate() const {
    detail::require(k >= 1 && k < d, "adaptive biclustering needs 1 <= k < d");
    detail::require(std::isfinite(tau) && tau > 0.0, "budget tau must be positive");
    detail::require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    detail::require(std::isfinite(mu) && mu >= 0.0, "mu must be finite and nonnegative");
  }
};

// (d^2 / k^2) ln(2 / delta), before rounding.
inline double probe_allowance(std::size_t d, std::size_t k, double delta) {
  const double ratio = double(d) / double(k);
  return ratio * ratio * std::log(2.0 / delta);
}

// T = ceil((d^2 / k^2) ln(2 / delta)).
inline std::size_t probe_cap(std::size_t d, std::size_t k, double delta) {
  return static_cast<std::size_t>(std::ceil(probe_allowance(d, k, delta)));
}

// Energy per measurement used by a run: b = tau / (2d + T).
inline double per_measurement_energy(const AdaptiveParams& p) {
  return p.tau / (2.0 * double(p.d) + double(probe_cap(p.d, p.k, p.delta)));
}

// sqrt((2 / b) ln(4 d^2 / delta)) with b = tau / (2d + (d^2 / k^2) ln(2 / delta)).
inline double required_signal(std::size_t d, std::size_t k, double tau, double delta) {
  AdaptiveParams{d, k, 0.0, tau, delta}.validate();
  const double b = tau / (2.0 * double(d) + probe_allowance(d, k, delta));
  return std::sqrt(2.0 / b * std::log(4.0 * double(d) * double(d) / delta));
}

// Interactive rate sqrt((d^2 / (tau k^2) + d / tau) log d).
inline double interactive_rate(std::size_t d, std::size_t k, double tau) {
  detail::require(k >= 1 && k < d && tau > 0.0, "interactive rate needs 1 <= k < d and tau > 0");
  const double dd = double(d), kk = double(k);
  return std::sqrt((dd * dd / (tau * kk * kk) + dd / tau) * std::log(dd));
}

struct BiclusterTruth {
  std::vector<std::size_t> rows;  // sorted
  std::vector<std::size_t> cols;  // sorted
};

struct AdaptiveRun {
  AdaptiveParams params;
  std::size_t probe_cap = 0;
  double energy = 0.0;  // b
  std::size_t probes = 0;
  bool hit = false;
  std::size_t hit_row = 0;
  std::size_t hit_col = 0;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  bool thresholded = true;  // false if a top-k fallback was used
  std::optional<bool> success;
  double energy_spent = 0.0;
};

namespace detail {

inline std::vector<std::size_t> sample_subset(std::size_t d, std::size_t k, RngStream& rng) {
  std::vector<std::size_t> pool(d);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(d - i)]);
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

inline std::vector<bool> membership(std::size_t d, const std::vector<std::size_t>& set) {
  std::vector<bool> in(d, false);
  for (auto i : set) in[i] = true;
  return in;
}

// Indices of readings above the threshold, or the k largest when that count is not k.
inline std::vector<std::size_t> select_active(const std::vector<double>& readings, std::size_t k, double threshold,
                                              bool& thresholded) {
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < readings.size(); ++i)
    if (readings[i] > threshold) active.push_back(i);
  if (active.size() == k) return active;
  thresholded = false;
  std::vector<std::size_t> order(readings.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return readings[a] > readings[b]; });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace detail

inline BiclusterTruth random_bicluster(std::size_t d, std::size_t k, RngStream& rng) {
  detail::require(k >= 1 && k < d, "bicluster truth needs 1 <= k < d");
  BiclusterTruth t;
  t.rows = detail::sample_subset(d, k, rng);
  t.cols = detail::sample_subset(d, k, rng);
  return t;
}

inline AdaptiveRun run_adaptive_bicluster(const AdaptiveParams& params, const BiclusterTruth& truth, RngStream& rng) {
  params.validate();
  const std::size_t d = params.d;
  detail::require(truth.rows.size() == params.k && truth.cols.size() == params.k,
                  "truth must have k rows and k columns");
  for (auto i : truth.rows) detail::require(i < d, "truth row out of range");
  for (auto i : truth.cols) detail::require(i < d, "truth column out of range");
  const auto in_row = detail::membership(d, truth.rows);
  const auto in_col = detail::membership(d, truth.cols);

  AdaptiveRun run;
  run.params = params;
  run.probe_cap = probe_cap(d, params.k, params.delta);
  run.energy = per_measurement_energy(params);
  const double sd = 1.0 / std::sqrt(run.energy);
  const double threshold = params.mu / 2.0;
  auto measure = [&](std::size_t r, std::size_t c) {
    return (in_row[r] && in_col[c] ? params.mu : 0.0) + sd * rng.normal();
  };

  while (run.probes < run.probe_cap) {
    const std::size_t r = rng.below(d), c = rng.below(d);
    ++run.probes;
    if (measure(r, c) > threshold) {
      run.hit = true;
      run.hit_row = r;
      run.hit_col = c;
      break;
    }
  }
  if (!run.hit) {
    run.energy_spent = run.energy * double(run.probes);
    run.success = false;
    return run;
  }

  std::vector<double> along_row(d), along_col(d);
  for (std::size_t c = 0; c < d; ++c) along_row[c] = measure(run.hit_row, c);
  for (std::size_t r = 0; r < d; ++r) along_col[r] = measure(r, run.hit_col);
  run.cols = detail::select_active(along_row, params.k, threshold, run.thresholded);
  run.rows = detail::select_active(along_col, params.k, threshold, run.thresholded);
  run.energy_spent = run.energy * double(run.probes + 2 * d);
  run.success = run.rows == truth.rows && run.cols == truth.cols;
  return run;
}

inline AdaptiveRun run_adaptive_bicluster(const AdaptiveParams& params, const BiclusterTruth& truth,
                                          RngHandle handle) {
  RngStream rng(handle);
  return run_adaptive_bicluster(params, truth, rng);
}

struct AdaptiveBatch {
  AdaptiveParams params;
  std::uint64_t seed = 0;
  std::vector<AdaptiveRun> runs;
  std::size_t successes = 0;
  std::size_t hits = 0;
  Interval success_ci;

  double success_rate() const { return runs.empty() ? 0.0 : double(successes) / double(runs.size()); }
  double hit_rate() const { return runs.empty() ? 0.0 : double(hits) / double(runs.size()); }
};

// Run r draws a fresh uniformly random truth and then runs the sampler, all
// from stream (seed, r).
inline AdaptiveBatch run_adaptive_batch(const AdaptiveParams& params, std::size_t runs, std::uint64_t seed,
                                        std::size_t threads = thread_count()) {
  params.validate();
  detail::require(runs >= 1, "need at least one run");
  AdaptiveBatch batch;
  batch.params = params;
  batch.seed = seed;
  batch.runs.resize(runs);
  parallel_for(
      runs,
      [&](std::size_t r) {
        RngStream rng({seed, r});
        const auto truth = random_bicluster(params.d, params.k, rng);
        batch.runs[r] = run_adaptive_bicluster(params, truth, rng);
      },
      threads);
  for (const auto& run : batch.runs) {
    batch.successes += run.success.value_or(false) ? 1 : 0;
    batch.hits += run.hit ? 1 : 0;
  }
  batch.success_ci = wilson_interval(batch.successes, runs);
  return batch;
}

// Rates and the non-interactive lower-bound verdict at the same (mu, tau).
struct AdaptiveComparison {
  double required_signal = 0.0;
  double interactive_rate = 0.0;
  double noninteractive_rate = 0.0;  // sqrt((d^2 / (tau k)) log(k(d-k)))
  BoundVerdict noninteractive_lower_bound;  // biclusters, uniform B = tau / d^2
};

inline AdaptiveComparison compare_adaptive(const AdaptiveParams& params) {
  params.validate();
  AdaptiveComparison c;
  c.required_signal = required_signal(params.d, params.k, params.tau, params.delta);
  c.interactive_rate = interactive_rate(params.d, params.k, params.tau);
  c.noninteractive_rate = *biclusters_rate(params.d, params.k, params.tau).budgeted;
  const Family family = make_biclusters(params.d, params.k, params.mu);
  c.noninteractive_lower_bound = minimax_lower_bound_holds(
      family, params.delta, uniform_design(family.dimension(), params.tau));
  return c;
}

}  // namespace snm
