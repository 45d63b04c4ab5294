#pragma once

// Exponentiated distance function (EDF) and its design-weighted variant
// (SEDF), the minimax thresholds built on them, the min-distance baseline and
// closed-form rates for the structured families.
//
//   W_j(V, alpha)    = sum_{k != j} exp(-||v_j - v_k||^2 / alpha)
//   W(V, alpha)      = max_j W_j(V, alpha)
//   W(V, alpha, B)   = same with ||x||_B^2 = sum_i B(i) x(i)^2
//
// W(V, 8[, B]) <= delta bounds the MLE risk by delta. W(V, 2(1-delta)[, B]) >=
// 2^{1/(1-delta)} - 1 forces every estimator's risk (under B) to be >= delta.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snm/design_strategy.hpp"
#include "snm/errors.hpp"
#include "snm/family.hpp"
#include "snm/zoo.hpp"

namespace snm {

// Per-hypothesis values are listed only up to this many hypotheses; larger
// transitive families report the common value once with all_equal set.
inline constexpr std::uint64_t kMaxListedHypotheses = 1'000'000;
inline constexpr double kArgmaxRelativeTolerance = 1e-9;
inline constexpr double kLogSpaceExponent = -700.0;

struct EdfReport {
  double alpha = 0.0;
  double value = 0.0;                            // W = max_j W_j
  double log_value = -std::numeric_limits<double>::infinity();
  std::vector<double> per_hypothesis;            // W_j, length M unless compressed
  std::vector<std::uint64_t> argmax;             // hypotheses within 1e-9 relative of W
  bool all_equal = false;                        // every W_j equals value by symmetry
  bool compressed = false;                       // per_hypothesis holds a single representative
  std::optional<DesignStrategy> design;

  bool vacuous_upper_bound() const { return value > 1.0; }
};

namespace detail {

struct ExpSum {
  double value = 0.0;
  double log_value = -std::numeric_limits<double>::infinity();
};

// sum_t mult_t * exp(-dist_t / alpha). Direct summation in the given order,
// switching to log-sum-exp when some exponent falls below -700.
inline ExpSum exp_sum(std::span<const SpectrumEntry> entries, double alpha) {
  ExpSum out;
  if (entries.empty()) return out;
  bool log_space = false;
  for (const auto& e : entries)
    if (-e.sq_distance / alpha < kLogSpaceExponent) log_space = true;
  if (!log_space) {
    double total = 0.0;
    for (const auto& e : entries) total += e.multiplicity * std::exp(-e.sq_distance / alpha);
    out.value = total;
    out.log_value = std::log(total);
    return out;
  }
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& e : entries)
    if (e.multiplicity > 0) peak = std::max(peak, std::log(e.multiplicity) - e.sq_distance / alpha);
  if (!std::isfinite(peak)) return out;
  double scaled = 0.0;
  for (const auto& e : entries)
    if (e.multiplicity > 0) scaled += std::exp(std::log(e.multiplicity) - e.sq_distance / alpha - peak);
  out.log_value = peak + std::log(scaled);
  out.value = std::exp(out.log_value);
  return out;
}

inline void finish_report(EdfReport& report, const std::vector<double>& logs) {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_index = 0;
  for (std::size_t j = 0; j < logs.size(); ++j)
    if (logs[j] > best) {
      best = logs[j];
      best_index = j;
    }
  report.log_value = best;
  report.value = logs.empty() ? 0.0 : report.per_hypothesis[best_index];
  const double cutoff = best + std::log1p(-kArgmaxRelativeTolerance);
  for (std::size_t j = 0; j < logs.size(); ++j)
    if (!std::isfinite(best) || logs[j] >= cutoff) report.argmax.push_back(j);
}

inline void require_alpha(double alpha) {
  require(std::isfinite(alpha) && alpha > 0.0, "alpha must be positive, got " + std::to_string(alpha));
}

}  // namespace detail

inline EdfReport edf(const Family& family, double alpha) {
  detail::require_alpha(alpha);
  EdfReport report;
  report.alpha = alpha;
  const std::uint64_t m = family.size();

  if (family.transitive()) {
    const auto spectrum = family.spectrum(0);
    const auto sum = detail::exp_sum(spectrum.entries, alpha);
    report.all_equal = true;
    report.value = sum.value;
    report.log_value = sum.log_value;
    if (m <= kMaxListedHypotheses) {
      report.per_hypothesis.assign(m, sum.value);
      report.argmax.resize(m);
      for (std::uint64_t j = 0; j < m; ++j) report.argmax[j] = j;
    } else {
      report.per_hypothesis = {sum.value};
      report.compressed = true;
    }
    return report;
  }

  if (m > kMaxListedHypotheses)
    throw CapabilityError("EDF of a non-symmetric family with " + std::to_string(m) + " hypotheses refused");
  std::vector<double> logs(m);
  report.per_hypothesis.resize(m);
  for (std::uint64_t j = 0; j < m; ++j) {
    const auto sum = detail::exp_sum(family.spectrum(j).entries, alpha);
    report.per_hypothesis[j] = sum.value;
    logs[j] = sum.log_value;
  }
  detail::finish_report(report, logs);
  report.all_equal = m > 0 && report.argmax.size() == m;
  return report;
}

// ||x||_B^2 between two materialized rows, pairwise-summed.
inline double weighted_sq_distance(std::span<const double> a, std::span<const double> b,
                                   std::span<const double> weights) {
  std::vector<double> terms(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    terms[i] = weights[i] * diff * diff;
  }
  return detail::pairwise_sum(terms);
}

inline EdfReport sedf(const Family& family, double alpha, const DesignStrategy& design) {
  detail::require_alpha(alpha);
  detail::require(design.dimension() == family.dimension(),
                  "design dimension " + std::to_string(design.dimension()) + " != family dimension " +
                      std::to_string(family.dimension()));
  // Constant B = c rescales every squared distance by c: W(V, alpha, c) = W(V, alpha / c).
  const auto e = design.energies();
  if (e.front() > 0.0 && std::all_of(e.begin(), e.end(), [&](double b) { return b == e.front(); })) {
    EdfReport report = edf(family, alpha / e.front());
    report.alpha = alpha;
    report.design = design;
    return report;
  }
  const Matrix vectors = family.materialize();
  const std::uint64_t m = vectors.rows;
  EdfReport report;
  report.alpha = alpha;
  report.design = design;
  report.per_hypothesis.resize(m);
  std::vector<double> logs(m);
  std::vector<double> row_distances;
  for (std::uint64_t j = 0; j < m; ++j) {
    row_distances.clear();
    for (std::uint64_t k = 0; k < m; ++k)
      if (k != j) row_distances.push_back(weighted_sq_distance(vectors.row(j), vectors.row(k), design.energies()));
    const auto sum = detail::exp_sum(detail::group_distances(row_distances), alpha);
    report.per_hypothesis[j] = sum.value;
    logs[j] = sum.log_value;
  }
  detail::finish_report(report, logs);
  report.all_equal = m > 0 && report.argmax.size() == m;
  return report;
}

inline EdfReport edf_or_sedf(const Family& family, double alpha, const std::optional<DesignStrategy>& design) {
  return design ? sedf(family, alpha, *design) : edf(family, alpha);
}

// W(V, 8[, B]); a bound on the MLE maximum risk whenever it is <= 1.
inline double mle_upper_bound(const Family& family, const std::optional<DesignStrategy>& design = std::nullopt) {
  return edf_or_sedf(family, 8.0, design).value;
}

enum class BoundKind { upper, lower };

struct BoundVerdict {
  double delta = 0.0;
  BoundKind kind = BoundKind::lower;
  double alpha = 0.0;
  double w = 0.0;
  double threshold = 0.0;
  bool holds = false;
};

// Upper bound: the MLE risk is <= delta when W(V, 8[, B]) <= delta.
inline BoundVerdict mle_upper_bound_verdict(const Family& family, double delta,
                                            const std::optional<DesignStrategy>& design = std::nullopt) {
  detail::require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  BoundVerdict v;
  v.delta = delta;
  v.kind = BoundKind::upper;
  v.alpha = 8.0;
  v.w = mle_upper_bound(family, design);
  v.threshold = delta;
  v.holds = v.w <= delta;
  return v;
}

// Lower bound: every estimator has maximum risk >= delta when
// W(V, 2(1-delta)[, B]) >= 2^{1/(1-delta)} - 1.
inline BoundVerdict minimax_lower_bound_holds(const Family& family, double delta,
                                              const std::optional<DesignStrategy>& design = std::nullopt) {
  detail::require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  BoundVerdict v;
  v.delta = delta;
  v.kind = BoundKind::lower;
  v.alpha = 2.0 * (1.0 - delta);
  v.w = edf_or_sedf(family, v.alpha, design).value;
  v.threshold = std::exp2(1.0 / (1.0 - delta)) - 1.0;
  v.holds = v.w >= v.threshold;
  return v;
}

// Smallest pairwise squared distance.
inline double min_sq_distance(const Family& family) {
  const std::uint64_t m = family.size();
  detail::require(m >= 2, "minimum distance needs at least two hypotheses");
  if (family.transitive()) return family.spectrum(0).entries.front().sq_distance;
  if (m > kMaxListedHypotheses) throw CapabilityError("minimum distance scan refused for M=" + std::to_string(m));
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t j = 0; j < m; ++j) best = std::min(best, family.spectrum(j).entries.front().sq_distance);
  return best;
}

// Classical union bound at the minimum distance: (M - 1) exp(-d_min^2 / 8).
// Dominates W(V, 8) term by term.
inline double min_distance_bound(const Family& family) {
  const double d2 = min_sq_distance(family);
  return static_cast<double>(family.size() - 1) * std::exp(-d2 / 8.0);
}

// Rates mu ~ f(params) at which the minimax risk transitions.
struct RateDescriptor {
  FamilyKind kind = FamilyKind::ksets;
  double isotropic = 0.0;
  std::optional<double> budgeted;      // when a budget tau was supplied
  std::optional<double> degree_ratio;  // stars: deg_max / deg_min
  std::string note;
};

namespace detail {
inline std::optional<double> checked_tau(std::optional<double> tau) {
  if (tau) require(std::isfinite(*tau) && *tau > 0.0, "budget tau must be positive");
  return tau;
}
}  // namespace detail

inline RateDescriptor ksets_rate(std::size_t d, std::size_t k, std::optional<double> tau = std::nullopt) {
  detail::require(k >= 1 && k < d, "k-sets need 1 <= k < d");
  tau = detail::checked_tau(tau);
  const double lg = std::log(double(k) * double(d - k));
  RateDescriptor r{FamilyKind::ksets, std::sqrt(lg), std::nullopt, std::nullopt, "sqrt(log(k(d-k)))"};
  if (tau) r.budgeted = std::sqrt(double(d) / *tau * lg);
  return r;
}

inline RateDescriptor biclusters_rate(std::size_t d, std::size_t k, std::optional<double> tau = std::nullopt) {
  detail::require(k >= 1 && k < d, "biclusters need 1 <= k < d");
  tau = detail::checked_tau(tau);
  const double lg = std::log(double(k) * double(d - k));
  RateDescriptor r{FamilyKind::biclusters, std::sqrt(lg / double(k)), std::nullopt, std::nullopt,
                   "sqrt(log(k(d-k))/k)"};
  if (tau) r.budgeted = std::sqrt(double(d) * double(d) / (*tau * double(k)) * lg);
  return r;
}

inline RateDescriptor cbm_rate(std::size_t n, std::size_t m, std::optional<double> tau = std::nullopt) {
  detail::require(m >= 1 && m <= n, "CBM needs 1 <= m <= n");
  tau = detail::checked_tau(tau);
  const double lg = std::log(double(n) * double(m));
  RateDescriptor r{FamilyKind::cbm, std::sqrt(lg / double(m)), std::nullopt, std::nullopt,
                   "lower-bound rate sqrt(log(nm)/m)"};
  if (tau) r.budgeted = std::sqrt(double(n) * double(n) * lg / (double(m) * *tau));
  return r;
}

// Valid as a rate only when deg_max / deg_min stays bounded along the sequence
// of graphs; the ratio is reported so callers can judge.
inline RateDescriptor stars_rate(const Graph& g) {
  detail::require(g.vertex_count() >= 2 && g.min_degree() >= 1, "stars rate needs a graph without isolated vertices");
  const double dmin = double(g.min_degree());
  RateDescriptor r{FamilyKind::stars, std::sqrt(std::log(double(g.vertex_count()) - dmin) / dmin), std::nullopt,
                   double(g.max_degree()) / dmin, "sqrt(log(|V|-deg_min)/deg_min); assumes bounded deg_max/deg_min"};
  return r;
}

inline RateDescriptor closed_form_rate(const Family& family, std::optional<double> tau = std::nullopt) {
  const auto& model = family.model();
  if (const auto* ks = dynamic_cast<const KSetsModel*>(&model)) return ksets_rate(ks->d(), ks->k(), tau);
  if (const auto* bc = dynamic_cast<const BiclusterModel*>(&model)) return biclusters_rate(bc->d(), bc->k(), tau);
  if (const auto* cb = dynamic_cast<const CbmModel*>(&model)) return cbm_rate(cb->n(), cb->m(), tau);
  if (const auto* st = dynamic_cast<const StarsModel*>(&model)) return stars_rate(st->graph());
  throw ValidationError("no closed-form rate for family kind '" + to_string(family.kind()) + "'");
}

// Lower bound on W(V, alpha) for a CBM family from its deepest-level swap
// neighbours alone: (#distinct neighbours) * exp(-swap distance / alpha).
struct CbmSwapBound {
  std::size_t swaps = 0;               // n * m / 2
  std::size_t distinct_neighbors = 0;  // n * m / 2, or n * m / 4 when m == 2
  double swap_sq_distance = 0.0;       // 8 (m - 1) mu^2 under this vectorization
  double bound = 0.0;
};

inline CbmSwapBound cbm_swap_lower_bound(const Family& family, double alpha) {
  detail::require_alpha(alpha);
  const auto swaps = cbm_elementary_swaps(family, 0);
  CbmSwapBound out;
  out.swaps = swaps.size();
  if (swaps.empty()) return out;
  std::vector<std::uint64_t> neighbors;
  for (const auto& s : swaps) neighbors.push_back(s.neighbor);
  std::sort(neighbors.begin(), neighbors.end());
  out.distinct_neighbors =
      static_cast<std::size_t>(std::unique(neighbors.begin(), neighbors.end()) - neighbors.begin());
  out.swap_sq_distance = swaps.front().sq_distance;
  out.bound = double(out.distinct_neighbors) * std::exp(-out.swap_sq_distance / alpha);
  return out;
}

}  // namespace snm
