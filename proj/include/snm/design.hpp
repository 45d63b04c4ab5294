#pragma once

// Budgeted sensing design: minimize W(V, alpha, B) over {B >= 0, sum B = tau}
// by projected subgradient descent, and check the first-order certificate
// that the pi-averaged subgradient is constant across coordinates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "snm/design_strategy.hpp"
#include "snm/edf.hpp"
#include "snm/errors.hpp"
#include "snm/family.hpp"
#include "snm/rng.hpp"

namespace snm {

// Euclidean projection of v onto {B >= 0, sum B = tau} (sort-and-threshold).
inline DesignStrategy project_budget_simplex(std::span<const double> v, double tau) {
  detail::require(std::isfinite(tau) && tau > 0.0, "budget must be positive");
  detail::require(!v.empty(), "cannot project an empty vector");
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    running += sorted[i];
    const double candidate = (running - tau) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0.0) theta = candidate;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return DesignStrategy(std::move(out));
}

// Sparse per-pair squared coordinate differences of a materialized family,
// for repeated SEDF and subgradient evaluation at changing B.
class PairTable {
 public:
  static constexpr std::uint64_t kMaxPairs = 20'000'000;

  explicit PairTable(const Family& family) : m_(family.size()), d_(family.dimension()) {
    const std::uint64_t pairs = m_ * (m_ - 1) / 2;
    if (pairs > kMaxPairs) throw CapabilityError("design optimization refused: " + std::to_string(pairs) + " pairs");
    const Matrix vectors = family.materialize();
    offsets_.reserve(pairs + 1);
    offsets_.push_back(0);
    for (std::uint64_t j = 0; j < m_; ++j)
      for (std::uint64_t k = j + 1; k < m_; ++k) {
        const auto a = vectors.row(j), b = vectors.row(k);
        for (std::size_t i = 0; i < d_; ++i) {
          const double diff = a[i] - b[i];
          if (diff != 0.0) {
            coords_.push_back(static_cast<std::uint32_t>(i));
            sq_diffs_.push_back(diff * diff);
          }
        }
        offsets_.push_back(coords_.size());
      }
  }

  std::uint64_t size() const { return m_; }
  std::size_t dimension() const { return d_; }

  // ||v_j - v_k||_B^2 for every pair, in pair order.
  std::vector<double> weighted_distances(std::span<const double> b) const {
    std::vector<double> out(offsets_.size() - 1);
    for (std::size_t p = 0; p + 1 < offsets_.size(); ++p) {
      double s = 0.0;
      for (std::size_t t = offsets_[p]; t < offsets_[p + 1]; ++t) s += b[coords_[t]] * sq_diffs_[t];
      out[p] = s;
    }
    return out;
  }

  std::size_t pair_index(std::uint64_t j, std::uint64_t k) const {
    if (j > k) std::swap(j, k);
    // Pairs (j, k), j < k, enumerated row by row.
    return static_cast<std::size_t>(j * (2 * m_ - j - 1) / 2 + (k - j - 1));
  }

  // W_j(V, alpha, B) for all j given the pair distances.
  std::vector<double> objective_terms(std::span<const double> distances, double alpha) const {
    std::vector<double> w(m_, 0.0);
    for (std::uint64_t j = 0; j < m_; ++j)
      for (std::uint64_t k = 0; k < m_; ++k)
        if (k != j) w[j] += std::exp(-distances[pair_index(j, k)] / alpha);
    return w;
  }

  // accumulates weight * sum_k (v_k(i) - v_j(i))^2 exp(-D_jk / alpha) into out.
  void accumulate_sensitivity(std::uint64_t j, double weight, std::span<const double> distances, double alpha,
                              std::span<double> out) const {
    for (std::uint64_t k = 0; k < m_; ++k) {
      if (k == j) continue;
      const std::size_t p = pair_index(j, k);
      const double e = weight * std::exp(-distances[p] / alpha);
      if (e == 0.0) continue;
      for (std::size_t t = offsets_[p]; t < offsets_[p + 1]; ++t) out[coords_[t]] += sq_diffs_[t] * e;
    }
  }

 private:
  std::uint64_t m_;
  std::size_t d_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> coords_;
  std::vector<double> sq_diffs_;
};

struct StationarityCertificate {
  Verdict verdict = Verdict::inconclusive;
  std::vector<double> sensitivity;  // g(i) per coordinate
  double max_relative_deviation = 0.0;
  std::vector<std::pair<std::uint64_t, double>> pi;  // weights over the argmax set
  double objective = 0.0;                            // W(V, alpha, B)
  double tolerance = 0.0;
  // g(i) = E_{j~pi} sum_{k!=j} (v_k(i) - v_j(i))^2 exp(-||v_k - v_j||_B^2 / alpha),
  // i.e. -alpha times the averaged partial derivative of W_j.
  std::string convention = "exp(-||v_k-v_j||_B^2/alpha), no 1/alpha prefactor";
};

struct StationarityOptions {
  double tolerance = 1e-6;
  std::optional<std::vector<std::pair<std::uint64_t, double>>> pi;  // default: uniform over argmax
  std::optional<double> tau;                                        // declared budget to check against
};

namespace detail {

inline StationarityCertificate certify_with_table(const PairTable& table, double alpha, std::span<const double> b,
                                                  const StationarityOptions& options) {
  const auto distances = table.weighted_distances(b);
  const auto terms = table.objective_terms(distances, alpha);
  StationarityCertificate cert;
  cert.tolerance = options.tolerance;
  cert.objective = terms.empty() ? 0.0 : *std::max_element(terms.begin(), terms.end());

  std::vector<std::uint64_t> argmax;
  for (std::uint64_t j = 0; j < terms.size(); ++j)
    if (terms[j] >= cert.objective * (1.0 - kArgmaxRelativeTolerance)) argmax.push_back(j);
  if (terms.size() < 2 || argmax.empty())
    throw ValidationError("stationarity certificate needs at least two hypotheses");

  if (options.pi) {
    double total = 0.0;
    for (const auto& [j, w] : *options.pi) {
      require(std::find(argmax.begin(), argmax.end(), j) != argmax.end(),
              "pi puts mass on hypothesis " + std::to_string(j) + " outside the argmax set");
      require(w >= 0.0, "pi weights must be nonnegative");
      total += w;
    }
    require(std::abs(total - 1.0) <= 1e-9, "pi weights must sum to 1");
    cert.pi = *options.pi;
  } else {
    for (auto j : argmax) cert.pi.emplace_back(j, 1.0 / static_cast<double>(argmax.size()));
  }

  cert.sensitivity.assign(table.dimension(), 0.0);
  for (const auto& [j, w] : cert.pi) table.accumulate_sensitivity(j, w, distances, alpha, cert.sensitivity);

  if (table.dimension() == 1) {
    cert.verdict = Verdict::pass;
    return cert;
  }
  const auto [lo, hi] = std::minmax_element(cert.sensitivity.begin(), cert.sensitivity.end());
  const double mean = std::accumulate(cert.sensitivity.begin(), cert.sensitivity.end(), 0.0) /
                      static_cast<double>(cert.sensitivity.size());
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    cert.verdict = Verdict::inconclusive;
    cert.max_relative_deviation = std::numeric_limits<double>::infinity();
    return cert;
  }
  cert.max_relative_deviation = (*hi - *lo) / mean;
  cert.verdict = cert.max_relative_deviation <= options.tolerance ? Verdict::pass : Verdict::fail;
  return cert;
}

}  // namespace detail

inline StationarityCertificate certify_stationarity(const Family& family, double alpha, const DesignStrategy& design,
                                                    const StationarityOptions& options = {}) {
  detail::require_alpha(alpha);
  detail::require(design.dimension() == family.dimension(), "design dimension must equal the family dimension");
  if (options.tau)
    detail::require(std::abs(design.budget() - *options.tau) <= 1e-9 * std::max(1.0, *options.tau),
                    "design budget " + std::to_string(design.budget()) + " does not match tau " +
                        std::to_string(*options.tau));
  const PairTable table(family);
  return detail::certify_with_table(table, alpha, design.energies(), options);
}

struct OptimizerConfig {
  double alpha = 8.0;
  double tau = 1.0;
  std::size_t max_iterations = 5000;
  double step_scale = 0.5;              // c in step_t = c * tau / (sqrt(t) * ||g_t||)
  double tolerance = 1e-6;              // relative best-objective improvement over `window`
  std::size_t window = 500;
  double certificate_tolerance = 1e-6;
  std::size_t certificate_every = 50;   // iterations between certificate checks
  std::uint64_t seed = 0;
  bool randomize_ties = false;          // pick the subgradient term uniformly among ties

  void validate() const {
    detail::require_alpha(alpha);
    detail::require(std::isfinite(tau) && tau > 0.0, "budget tau must be positive");
    detail::require(max_iterations >= 1, "need at least one iteration");
    detail::require(step_scale > 0.0 && tolerance > 0.0 && window >= 1 && certificate_tolerance > 0.0 &&
                        certificate_every >= 1,
                    "optimizer parameters must be positive");
  }
};

enum class OptimizerStatus { certified, converged, inconclusive };

inline std::string to_string(OptimizerStatus s) {
  switch (s) {
    case OptimizerStatus::certified: return "CERTIFIED";
    case OptimizerStatus::converged: return "CONVERGED";
    case OptimizerStatus::inconclusive: return "INCONCLUSIVE";
  }
  return "UNKNOWN";
}

struct TraceRow {
  std::size_t iteration = 0;
  double objective = 0.0;
  double best_objective = 0.0;
};

struct OptimizerResult {
  DesignStrategy design;
  double objective = 0.0;           // W(V, alpha, design)
  double uniform_objective = 0.0;   // W(V, alpha, uniform)
  OptimizerStatus status = OptimizerStatus::inconclusive;
  StationarityCertificate certificate;  // at the returned design
  std::vector<TraceRow> trace;
};

// Projected subgradient descent from the uniform design. The subgradient of
// the max is taken from the first maximizing hypothesis; the running best
// iterate is returned, so the result is never worse than uniform.
inline OptimizerResult optimize_design(const Family& family, const OptimizerConfig& cfg) {
  cfg.validate();
  const std::size_t d = family.dimension();
  const PairTable table(family);
  RngStream tie_rng({cfg.seed, 0});

  auto evaluate = [&](std::span<const double> b, std::vector<double>& distances) {
    distances = table.weighted_distances(b);
    return table.objective_terms(distances, cfg.alpha);
  };

  std::vector<double> current(d, cfg.tau / static_cast<double>(d));
  std::vector<double> distances;
  auto terms = evaluate(current, distances);
  auto objective_of = [](const std::vector<double>& t) { return t.empty() ? 0.0 : *std::max_element(t.begin(), t.end()); };

  OptimizerResult result;
  double value = objective_of(terms);
  result.uniform_objective = value;
  std::vector<double> best = current;
  double best_value = value;
  result.trace.push_back({0, value, best_value});

  StationarityOptions cert_options;
  cert_options.tolerance = cfg.certificate_tolerance;
  auto certify = [&](std::span<const double> b) {
    return table.size() >= 2 ? detail::certify_with_table(table, cfg.alpha, b, cert_options) : StationarityCertificate{};
  };

  if (d == 1 || table.size() < 2) {
    result.status = OptimizerStatus::certified;
  } else if (certify(current).verdict == Verdict::pass) {
    result.status = OptimizerStatus::certified;
  } else {
    std::vector<double> history{best_value};  // best objective per iteration
    std::vector<double> g(d);
    for (std::size_t t = 1; t <= cfg.max_iterations; ++t) {
      // Pick the subgradient term.
      std::vector<std::uint64_t> ties;
      for (std::uint64_t j = 0; j < terms.size(); ++j)
        if (terms[j] >= value * (1.0 - kArgmaxRelativeTolerance)) ties.push_back(j);
      const std::uint64_t active = cfg.randomize_ties ? ties[tie_rng.below(ties.size())] : ties.front();

      std::fill(g.begin(), g.end(), 0.0);
      table.accumulate_sensitivity(active, -1.0 / cfg.alpha, distances, cfg.alpha, g);
      double norm = 0.0;
      for (double x : g) norm += x * x;
      norm = std::sqrt(norm);
      if (!(norm > 0.0)) {
        result.status = OptimizerStatus::converged;
        break;
      }
      const double step = cfg.step_scale * cfg.tau / (std::sqrt(static_cast<double>(t)) * norm);
      std::vector<double> moved(d);
      for (std::size_t i = 0; i < d; ++i) moved[i] = current[i] - step * g[i];
      const DesignStrategy projected = project_budget_simplex(moved, cfg.tau);
      current.assign(projected.energies().begin(), projected.energies().end());
      terms = evaluate(current, distances);
      value = objective_of(terms);
      if (value < best_value) {
        best_value = value;
        best = current;
      }
      result.trace.push_back({t, value, best_value});
      history.push_back(best_value);

      if (t % cfg.certificate_every == 0 && certify(best).verdict == Verdict::pass) {
        result.status = OptimizerStatus::certified;
        break;
      }
      if (t >= cfg.window) {
        const double before = history[t - cfg.window];
        if (before - best_value <= cfg.tolerance * std::abs(best_value)) {
          result.status = OptimizerStatus::converged;
          break;
        }
      }
    }
  }

  result.design = DesignStrategy(best);
  result.objective = best_value;
  result.certificate = certify(best);
  if (result.certificate.verdict == Verdict::pass) result.status = OptimizerStatus::certified;
  return result;
}

}  // namespace snm
