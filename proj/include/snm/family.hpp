#pragma once

// Hypothesis families: finite collections of mean vectors mu * v_j in R^d.
//
// A Family is a cheap-to-copy immutable handle around a model that knows the
// family at unit signal strength, plus the signal strength mu. Explicit
// families store their vectors; structured families (k-sets, biclusters,
// hierarchical clusterings, graph stars) compute distances and spectra by
// counting and only materialize vectors on demand.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "snm/detail/combinatorics.hpp"
#include "snm/errors.hpp"

namespace snm {

enum class FamilyKind { explicit_vectors, ksets, biclusters, cbm, stars };

inline std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::explicit_vectors: return "explicit";
    case FamilyKind::ksets: return "ksets";
    case FamilyKind::biclusters: return "biclusters";
    case FamilyKind::cbm: return "cbm";
    case FamilyKind::stars: return "stars";
  }
  return "unknown";
}

enum class Verdict { pass, fail, inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "UNKNOWN";
}

// Hard caps on explicit work. Structured families above these still support
// distance and spectrum queries.
inline constexpr std::uint64_t kMaxMaterializedHypotheses = 1'000'000;
inline constexpr std::uint64_t kMaxMaterializedEntries = 25'000'000;
inline constexpr std::uint64_t kMaxInvarianceHypotheses = 10'000;

struct SpectrumEntry {
  double sq_distance = 0.0;
  double multiplicity = 0.0;

  friend bool operator==(const SpectrumEntry&, const SpectrumEntry&) = default;
};

// The multiset {||v_j - v_k||^2 : k != j}, sorted by distance.
struct DistanceSpectrum {
  std::uint64_t hypothesis = 0;
  std::vector<SpectrumEntry> entries;

  double total_multiplicity() const {
    double total = 0.0;
    for (const auto& e : entries) total += e.multiplicity;
    return total;
  }
};

// Dense row-major M x d matrix of materialized hypothesis vectors.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

namespace detail {

// Groups a list of squared distances into a sorted spectrum.
inline std::vector<SpectrumEntry> group_distances(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<SpectrumEntry> out;
  for (double v : values) {
    if (!out.empty() && out.back().sq_distance == v) {
      out.back().multiplicity += 1.0;
    } else {
      out.push_back({v, 1.0});
    }
  }
  return out;
}

// Merges entries with equal distance values after sorting.
inline std::vector<SpectrumEntry> normalize_spectrum(std::vector<SpectrumEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.sq_distance < b.sq_distance; });
  std::vector<SpectrumEntry> out;
  for (const auto& e : entries) {
    if (e.multiplicity == 0.0) continue;
    if (!out.empty() && out.back().sq_distance == e.sq_distance) {
      out.back().multiplicity += e.multiplicity;
    } else {
      out.push_back(e);
    }
  }
  return out;
}

inline double sq_distance(std::span<const double> a, std::span<const double> b) {
  std::vector<double> terms(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    terms[i] = diff * diff;
  }
  return pairwise_sum(terms);
}

}  // namespace detail

// A family at unit signal strength. Implementations must be immutable.
class FamilyModel {
 public:
  virtual ~FamilyModel() = default;

  virtual FamilyKind kind() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::uint64_t size() const = 0;
  virtual double sq_distance(std::uint64_t i, std::uint64_t j) const = 0;
  virtual void vector(std::uint64_t j, std::span<double> out) const = 0;

  // True when every hypothesis has the same distance spectrum by construction.
  virtual bool transitive() const { return false; }

  virtual std::vector<SpectrumEntry> spectrum(std::uint64_t j) const {
    const std::uint64_t m = size();
    if (m > kMaxMaterializedHypotheses)
      throw CapabilityError("spectrum scan refused: family has " + std::to_string(m) + " hypotheses");
    std::vector<double> values;
    values.reserve(m > 0 ? m - 1 : 0);
    for (std::uint64_t k = 0; k < m; ++k)
      if (k != j) values.push_back(sq_distance(j, k));
    return detail::group_distances(std::move(values));
  }
};

class ExplicitModel final : public FamilyModel {
 public:
  explicit ExplicitModel(std::vector<std::vector<double>> vectors) : vectors_(std::move(vectors)) {
    detail::require(!vectors_.empty(), "explicit family needs at least one vector");
    dimension_ = vectors_.front().size();
    detail::require(dimension_ > 0, "explicit family vectors must be non-empty");
    for (const auto& v : vectors_) {
      detail::require(v.size() == dimension_, "explicit family vectors must share one dimension");
      for (double x : v) detail::require(std::isfinite(x), "explicit family vectors must be finite");
    }
  }

  FamilyKind kind() const override { return FamilyKind::explicit_vectors; }
  std::size_t dimension() const override { return dimension_; }
  std::uint64_t size() const override { return vectors_.size(); }

  double sq_distance(std::uint64_t i, std::uint64_t j) const override {
    if (i == j) return 0.0;
    return detail::sq_distance(vectors_[i], vectors_[j]);
  }

  void vector(std::uint64_t j, std::span<double> out) const override {
    std::copy(vectors_[j].begin(), vectors_[j].end(), out.begin());
  }

  const std::vector<std::vector<double>>& vectors() const { return vectors_; }

 private:
  std::vector<std::vector<double>> vectors_;
  std::size_t dimension_ = 0;
};

class Family {
 public:
  Family(std::shared_ptr<const FamilyModel> model, double mu) : model_(std::move(model)), mu_(mu) {
    detail::require(model_ != nullptr, "family model must not be null");
    detail::require(std::isfinite(mu_) && mu_ >= 0.0, "signal strength must be finite and nonnegative");
  }

  static Family from_vectors(std::vector<std::vector<double>> base, double mu = 1.0) {
    return Family(std::make_shared<ExplicitModel>(std::move(base)), mu);
  }

  FamilyKind kind() const { return model_->kind(); }
  std::size_t dimension() const { return model_->dimension(); }
  std::uint64_t size() const { return model_->size(); }
  double signal() const { return mu_; }
  bool transitive() const { return model_->transitive(); }
  const FamilyModel& model() const { return *model_; }

  void check_index(std::uint64_t j) const {
    if (j >= size())
      throw std::out_of_range("hypothesis index " + std::to_string(j) + " out of range [0, " +
                              std::to_string(size()) + ")");
  }

  double sq_distance(std::uint64_t i, std::uint64_t j) const {
    check_index(i);
    check_index(j);
    return mu_ * mu_ * model_->sq_distance(i, j);
  }

  DistanceSpectrum spectrum(std::uint64_t j) const {
    check_index(j);
    DistanceSpectrum out{j, model_->spectrum(j)};
    for (auto& e : out.entries) e.sq_distance *= mu_ * mu_;
    return out;
  }

  std::vector<double> vector(std::uint64_t j) const {
    check_index(j);
    std::vector<double> out(dimension());
    model_->vector(j, out);
    for (double& x : out) x *= mu_;
    return out;
  }

  // All hypothesis vectors (scaled by mu) as rows. Refuses oversized families.
  Matrix materialize(std::uint64_t max_hypotheses = kMaxMaterializedHypotheses) const {
    const std::uint64_t m = size();
    if (m > max_hypotheses || m * dimension() > kMaxMaterializedEntries)
      throw CapabilityError("family too large to materialize: M=" + std::to_string(m) +
                            ", d=" + std::to_string(dimension()));
    Matrix out(m, dimension());
    for (std::uint64_t j = 0; j < m; ++j) {
      auto row = out.row(j);
      model_->vector(j, row);
      for (double& x : row) x *= mu_;
    }
    return out;
  }

  Family with_signal(double mu) const { return Family(model_, mu); }

 private:
  std::shared_ptr<const FamilyModel> model_;
  double mu_ = 1.0;
};

// Squared Euclidean distance between hypotheses i and j.
inline double pairwise_sq_distance(const Family& family, std::uint64_t i, std::uint64_t j) {
  return family.sq_distance(i, j);
}

inline DistanceSpectrum distance_spectrum(const Family& family, std::uint64_t j) {
  return family.spectrum(j);
}

inline Family scale_signal(const Family& family, double mu) {
  detail::require(std::isfinite(mu) && mu >= 0.0, "signal strength must be finite and nonnegative");
  return family.with_signal(mu);
}

// Generators of a candidate permutation group acting on coordinates.
// A permutation p maps coordinate i to coordinate p[i].
struct PermutationSet {
  std::size_t dimension = 0;
  std::vector<std::vector<std::size_t>> generators;

  void validate() const {
    for (const auto& p : generators) {
      detail::require(p.size() == dimension, "permutation length must equal the family dimension");
      std::vector<bool> seen(dimension, false);
      for (std::size_t target : p) {
        detail::require(target < dimension && !seen[target], "permutation is not a bijection");
        seen[target] = true;
      }
    }
  }

  // Transpositions (i, i+1): generate the full symmetric group on coordinates.
  static PermutationSet adjacent_transpositions(std::size_t d) {
    PermutationSet set{d, {}};
    for (std::size_t i = 0; i + 1 < d; ++i) {
      std::vector<std::size_t> p(d);
      for (std::size_t c = 0; c < d; ++c) p[c] = c;
      std::swap(p[i], p[i + 1]);
      set.generators.push_back(std::move(p));
    }
    return set;
  }

  // Independent adjacent row swaps and column swaps of a d x d grid stored
  // row-major (coordinate a * d + b).
  static PermutationSet grid_row_column_transpositions(std::size_t d) {
    PermutationSet set{d * d, {}};
    for (std::size_t r = 0; r + 1 < d; ++r) {
      std::vector<std::size_t> p(d * d);
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
          const std::size_t a2 = a == r ? r + 1 : (a == r + 1 ? r : a);
          p[a * d + b] = a2 * d + b;
        }
      set.generators.push_back(std::move(p));
    }
    for (std::size_t c = 0; c + 1 < d; ++c) {
      std::vector<std::size_t> p(d * d);
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
          const std::size_t b2 = b == c ? c + 1 : (b == c + 1 ? c : b);
          p[a * d + b] = a * d + b2;
        }
      set.generators.push_back(std::move(p));
    }
    return set;
  }
};

struct InvarianceCertificate {
  Verdict verdict = Verdict::inconclusive;
  std::string detail;
  std::optional<std::size_t> violating_generator;
  std::optional<std::uint64_t> violating_hypothesis;
  std::uint64_t orbit_size = 0;
};

struct InvarianceOptions {
  std::uint64_t max_hypotheses = kMaxInvarianceHypotheses;
  std::uint64_t group_budget = 1'000'000;
};

// PASS iff every generator maps the family into itself and the orbit of
// hypothesis 0 under the generated group is the whole family.
inline InvarianceCertificate check_unitary_invariance(const Family& family, const PermutationSet& perms,
                                                      const InvarianceOptions& options = {}) {
  detail::require(perms.dimension == family.dimension(), "permutation dimension must equal the family dimension");
  perms.validate();
  const std::uint64_t m = family.size();
  if (m > options.max_hypotheses)
    throw CapabilityError("invariance check refused: M=" + std::to_string(m) + " exceeds explicit limit " +
                          std::to_string(options.max_hypotheses));

  const Matrix vectors = family.materialize(options.max_hypotheses);
  std::map<std::vector<double>, std::uint64_t> index;
  for (std::uint64_t j = 0; j < m; ++j) {
    auto row = vectors.row(j);
    index.emplace(std::vector<double>(row.begin(), row.end()), j);
  }

  InvarianceCertificate cert;
  // images[g][j] = index of P_g(v_j).
  std::vector<std::vector<std::uint64_t>> images(perms.generators.size(), std::vector<std::uint64_t>(m));
  std::vector<double> permuted(family.dimension());
  for (std::size_t g = 0; g < perms.generators.size(); ++g) {
    const auto& p = perms.generators[g];
    for (std::uint64_t j = 0; j < m; ++j) {
      auto row = vectors.row(j);
      for (std::size_t i = 0; i < row.size(); ++i) permuted[p[i]] = row[i];
      auto it = index.find(permuted);
      if (it == index.end()) {
        cert.verdict = Verdict::fail;
        cert.violating_generator = g;
        cert.violating_hypothesis = j;
        cert.detail = "generator " + std::to_string(g) + " maps hypothesis " + std::to_string(j) +
                      " outside the family";
        return cert;
      }
      images[g][j] = it->second;
    }
  }

  std::vector<bool> seen(m, false);
  std::vector<std::uint64_t> frontier{0};
  seen[0] = true;
  std::uint64_t reached = 1;
  std::uint64_t expansions = 0;
  while (!frontier.empty()) {
    const std::uint64_t j = frontier.back();
    frontier.pop_back();
    for (const auto& image : images) {
      if (++expansions > options.group_budget) {
        cert.verdict = Verdict::inconclusive;
        cert.orbit_size = reached;
        cert.detail = "group-element budget exhausted after " + std::to_string(reached) + " orbit elements";
        return cert;
      }
      const std::uint64_t next = image[j];
      if (!seen[next]) {
        seen[next] = true;
        ++reached;
        frontier.push_back(next);
      }
    }
  }
  cert.orbit_size = reached;
  if (reached == m) {
    cert.verdict = Verdict::pass;
    cert.detail = "family is closed under all generators and the orbit covers all hypotheses";
  } else {
    cert.verdict = Verdict::fail;
    const auto missing = static_cast<std::uint64_t>(std::find(seen.begin(), seen.end(), false) - seen.begin());
    cert.violating_hypothesis = missing;
    cert.detail = "orbit of hypothesis 0 has " + std::to_string(reached) + " of " + std::to_string(m) +
                  " hypotheses; hypothesis " + std::to_string(missing) + " unreachable";
  }
  return cert;
}

}  // namespace snm
