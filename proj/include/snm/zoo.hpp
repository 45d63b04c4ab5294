#pragma once

// Structured example families: k-sets, biclusters, balanced hierarchical
// clusterings (constant block model) and graph stars.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "snm/detail/combinatorics.hpp"
#include "snm/errors.hpp"
#include "snm/family.hpp"
#include "snm/graph.hpp"

namespace snm {

namespace detail {

inline std::size_t sorted_intersection_size(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  std::size_t count = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++count;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return count;
}

inline std::uint64_t checked_subset_count(std::size_t d, std::size_t k) {
  auto count = binomial_exact(d, k);
  if (!count || *count > (std::uint64_t{1} << 62))
    throw CapabilityError("C(" + std::to_string(d) + ", " + std::to_string(k) + ") does not fit a hypothesis index");
  return *count;
}

}  // namespace detail

// mu * 1_S over k-subsets S of [d], hypotheses in colexicographic order.
class KSetsModel final : public FamilyModel {
 public:
  KSetsModel(std::size_t d, std::size_t k) : d_(d), k_(k) {
    detail::require(k >= 1 && k < d, "k-sets need 1 <= k < d");
    size_ = detail::checked_subset_count(d, k);
  }

  FamilyKind kind() const override { return FamilyKind::ksets; }
  std::size_t dimension() const override { return d_; }
  std::uint64_t size() const override { return size_; }
  bool transitive() const override { return true; }

  std::size_t d() const { return d_; }
  std::size_t k() const { return k_; }

  std::vector<std::size_t> subset(std::uint64_t j) const { return detail::colex_unrank(j, d_, k_); }

  double sq_distance(std::uint64_t i, std::uint64_t j) const override {
    if (i == j) return 0.0;
    const auto a = subset(i), b = subset(j);
    return 2.0 * static_cast<double>(k_ - detail::sorted_intersection_size(a, b));
  }

  void vector(std::uint64_t j, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t c : subset(j)) out[c] = 1.0;
  }

  // s elements swapped out: distance 2s, C(k,s) C(d-k,s) neighbours.
  std::vector<SpectrumEntry> spectrum(std::uint64_t) const override {
    std::vector<SpectrumEntry> out;
    for (std::size_t s = 1; s <= k_; ++s) {
      const double mult = detail::binomial(k_, s) * detail::binomial(d_ - k_, s);
      if (mult > 0.0) out.push_back({2.0 * static_cast<double>(s), mult});
    }
    return out;
  }

 private:
  std::size_t d_, k_;
  std::uint64_t size_ = 0;
};

// mu * 1_R 1_C^T over pairs of k-subsets of [d], vectorized row-major
// (coordinate a * d + b). Hypothesis index = row_rank * C(d,k) + col_rank.
class BiclusterModel final : public FamilyModel {
 public:
  BiclusterModel(std::size_t d, std::size_t k) : d_(d), k_(k) {
    detail::require(k >= 1 && k < d, "biclusters need 1 <= k < d");
    per_side_ = detail::checked_subset_count(d, k);
    if (per_side_ > (std::uint64_t{1} << 31))
      throw CapabilityError("bicluster family too large to index");
    detail::require(d <= (std::size_t{1} << 16), "bicluster dimension too large");
  }

  FamilyKind kind() const override { return FamilyKind::biclusters; }
  std::size_t dimension() const override { return d_ * d_; }
  std::uint64_t size() const override { return per_side_ * per_side_; }
  bool transitive() const override { return true; }

  std::size_t d() const { return d_; }
  std::size_t k() const { return k_; }

  std::vector<std::size_t> rows(std::uint64_t j) const { return detail::colex_unrank(j / per_side_, d_, k_); }
  std::vector<std::size_t> cols(std::uint64_t j) const { return detail::colex_unrank(j % per_side_, d_, k_); }

  // Number of differing entries between blocks whose row and column sets
  // differ by s_r and s_c elements.
  double base_distance(std::size_t s_r, std::size_t s_c) const {
    return 2.0 * static_cast<double>(s_r * (k_ - s_c) + s_c * (k_ - s_r) + s_r * s_c);
  }

  double sq_distance(std::uint64_t i, std::uint64_t j) const override {
    if (i == j) return 0.0;
    const std::size_t s_r = k_ - detail::sorted_intersection_size(rows(i), rows(j));
    const std::size_t s_c = k_ - detail::sorted_intersection_size(cols(i), cols(j));
    return base_distance(s_r, s_c);
  }

  void vector(std::uint64_t j, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    const auto r = rows(j), c = cols(j);
    for (std::size_t a : r)
      for (std::size_t b : c) out[a * d_ + b] = 1.0;
  }

  std::vector<SpectrumEntry> spectrum(std::uint64_t) const override {
    std::vector<SpectrumEntry> out;
    for (std::size_t s_r = 0; s_r <= k_; ++s_r)
      for (std::size_t s_c = 0; s_c <= k_; ++s_c) {
        if (s_r == 0 && s_c == 0) continue;
        const double mult = detail::binomial(k_, s_r) * detail::binomial(d_ - k_, s_r) * detail::binomial(k_, s_c) *
                            detail::binomial(d_ - k_, s_c);
        out.push_back({base_distance(s_r, s_c), mult});
      }
    return detail::normalize_spectrum(std::move(out));
  }

 private:
  std::size_t d_, k_;
  std::uint64_t per_side_ = 0;
};

struct CbmParams {
  std::size_t n = 4;    // objects, power of two
  std::size_t m = 2;    // minimum (leaf) cluster size, power of two, m <= n
  double mu = 1.0;      // separation between consecutive levels
};

// Perfectly balanced binary hierarchical clusterings of n objects with leaf
// clusters of size m. A hypothesis is stored as an object ordering: positions
// [0, n) are split in halves recursively down to blocks of m. The similarity
// of objects x != y is (depth of their lowest common cluster + 1), root at
// depth 0. Vectors hold both symmetric copies of every off-diagonal entry,
// coordinate x * (n - 1) + (y < x ? y : y - 1); the diagonal is constant
// across the family and is not part of the vector.
class CbmModel final : public FamilyModel {
 public:
  static constexpr std::uint64_t kMaxHierarchies = 1'000'000;

  explicit CbmModel(std::size_t n, std::size_t m) : n_(n), m_(m) {
    detail::require(detail::is_power_of_two(n) && detail::is_power_of_two(m), "CBM n and m must be powers of two");
    detail::require(m <= n, "CBM needs m <= n");
    detail::require(n >= 2, "CBM needs at least two objects");
    detail::require(n <= 64, "CBM object count too large");
    const double count = hierarchy_count(n, m);
    if (count > static_cast<double>(kMaxHierarchies))
      throw CapabilityError("CBM with n=" + std::to_string(n) + ", m=" + std::to_string(m) + " has " +
                            std::to_string(count) + " hierarchies; enumeration refused");
    leaf_shift_ = detail::log2_exact(m);
    levels_ = detail::log2_exact(n / m);
    std::vector<std::uint8_t> objects(n);
    std::iota(objects.begin(), objects.end(), std::uint8_t{0});
    orders_ = enumerate(objects);
    for (std::uint64_t j = 0; j < orders_.size(); ++j) index_.emplace(orders_[j], j);
    positions_.resize(orders_.size());
    for (std::uint64_t j = 0; j < orders_.size(); ++j) {
      positions_[j].resize(n);
      for (std::size_t p = 0; p < n; ++p) positions_[j][orders_[j][p]] = static_cast<std::uint8_t>(p);
    }
  }

  // Number of balanced hierarchies: H(n) = C(n, n/2) / 2 * H(n/2)^2, H(m) = 1.
  static double hierarchy_count(std::size_t n, std::size_t m) {
    if (n <= m) return 1.0;
    const double half = hierarchy_count(n / 2, m);
    return detail::binomial(n, n / 2) / 2.0 * half * half;
  }

  FamilyKind kind() const override { return FamilyKind::cbm; }
  std::size_t dimension() const override { return n_ * (n_ - 1); }
  std::uint64_t size() const override { return orders_.size(); }
  bool transitive() const override { return true; }

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  std::size_t leaf_depth() const { return levels_; }

  const std::vector<std::uint8_t>& order(std::uint64_t j) const { return orders_[j]; }

  std::size_t coordinate(std::size_t x, std::size_t y) const { return x * (n_ - 1) + (y < x ? y : y - 1); }

  // Depth of the lowest common cluster of objects x and y in hypothesis j.
  std::size_t merge_depth(std::uint64_t j, std::size_t x, std::size_t y) const {
    return depth_of_positions(positions_[j][x], positions_[j][y]);
  }

  double sq_distance(std::uint64_t i, std::uint64_t j) const override {
    if (i == j) return 0.0;
    double total = 0.0;
    for (std::size_t x = 0; x < n_; ++x)
      for (std::size_t y = x + 1; y < n_; ++y) {
        const double diff = static_cast<double>(merge_depth(i, x, y)) - static_cast<double>(merge_depth(j, x, y));
        total += diff * diff;
      }
    return 2.0 * total;
  }

  void vector(std::uint64_t j, std::span<double> out) const override {
    for (std::size_t x = 0; x < n_; ++x)
      for (std::size_t y = 0; y < n_; ++y)
        if (x != y) out[coordinate(x, y)] = static_cast<double>(merge_depth(j, x, y) + 1);
  }

  // Hypothesis index of an arbitrary ordering (canonicalized first).
  std::uint64_t index_of(std::vector<std::uint8_t> order) const {
    canonicalize(order, 0, order.size());
    return index_.at(order);
  }

 private:
  std::size_t depth_of_positions(std::size_t p, std::size_t q) const {
    std::size_t diff = (p >> leaf_shift_) ^ (q >> leaf_shift_);
    std::size_t bits = 0;
    while (diff != 0) {
      diff >>= 1;
      ++bits;
    }
    return levels_ - bits;
  }

  // Canonical form: leaves sorted, and at every cluster the child holding the
  // smaller minimum comes first.
  void canonicalize(std::vector<std::uint8_t>& order, std::size_t lo, std::size_t hi) const {
    if (hi - lo <= m_) {
      std::sort(order.begin() + static_cast<std::ptrdiff_t>(lo), order.begin() + static_cast<std::ptrdiff_t>(hi));
      return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    canonicalize(order, lo, mid);
    canonicalize(order, mid, hi);
    if (order[mid] < order[lo])
      std::rotate(order.begin() + static_cast<std::ptrdiff_t>(lo), order.begin() + static_cast<std::ptrdiff_t>(mid),
                  order.begin() + static_cast<std::ptrdiff_t>(hi));
  }

  // All canonical orderings of `objects` (sorted), smallest element always in
  // the left child; splits enumerated in lexicographic order of the left child.
  std::vector<std::vector<std::uint8_t>> enumerate(const std::vector<std::uint8_t>& objects) const {
    if (objects.size() <= m_) return {objects};
    const std::size_t half = objects.size() / 2;
    std::vector<std::vector<std::uint8_t>> out;
    // Choose half - 1 companions for objects[0] among the rest.
    const std::size_t rest = objects.size() - 1;
    std::vector<std::size_t> pick(half - 1);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    for (;;) {
      std::vector<std::uint8_t> left{objects[0]}, right;
      std::vector<bool> chosen(rest, false);
      for (std::size_t p : pick) chosen[p] = true;
      for (std::size_t i = 0; i < rest; ++i) (chosen[i] ? left : right).push_back(objects[i + 1]);
      const auto lefts = enumerate(left);
      const auto rights = enumerate(right);
      for (const auto& l : lefts)
        for (const auto& r : rights) {
          std::vector<std::uint8_t> order(l);
          order.insert(order.end(), r.begin(), r.end());
          out.push_back(std::move(order));
        }
      // Next combination in lexicographic order.
      std::size_t i = pick.size();
      while (i > 0 && pick[i - 1] == rest - pick.size() + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t t = i; t < pick.size(); ++t) pick[t] = pick[t - 1] + 1;
    }
    return out;
  }

  std::size_t n_, m_;
  std::size_t leaf_shift_ = 0, levels_ = 0;
  std::vector<std::vector<std::uint8_t>> orders_;
  std::vector<std::vector<std::uint8_t>> positions_;
  std::map<std::vector<std::uint8_t>, std::uint64_t> index_;
};

// Stars of a graph: hypothesis j is the indicator of the edges incident to
// vertex j, coordinates in edge insertion order.
class StarsModel final : public FamilyModel {
 public:
  explicit StarsModel(Graph graph) : graph_(std::move(graph)) {
    detail::require(graph_.vertex_count() >= 1 && graph_.edge_count() >= 1, "stars need a nonempty graph");
    for (std::size_t v = 0; v < graph_.vertex_count(); ++v)
      detail::require(graph_.degree(v) >= 1, "stars family rejects isolated vertex " + std::to_string(v));
  }

  FamilyKind kind() const override { return FamilyKind::stars; }
  std::size_t dimension() const override { return graph_.edge_count(); }
  std::uint64_t size() const override { return graph_.vertex_count(); }
  const Graph& graph() const { return graph_; }

  double sq_distance(std::uint64_t i, std::uint64_t j) const override {
    if (i == j) return 0.0;
    const double shared = graph_.adjacent(i, j) ? 2.0 : 0.0;
    return static_cast<double>(graph_.degree(i) + graph_.degree(j)) - shared;
  }

  void vector(std::uint64_t j, std::span<double> out) const override {
    const auto& edges = graph_.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) out[e] = (edges[e].first == j || edges[e].second == j) ? 1.0 : 0.0;
  }

 private:
  Graph graph_;
};

inline Family make_ksets(std::size_t d, std::size_t k, double mu) {
  return Family(std::make_shared<KSetsModel>(d, k), mu);
}

inline Family make_biclusters(std::size_t d, std::size_t k, double mu) {
  return Family(std::make_shared<BiclusterModel>(d, k), mu);
}

inline Family make_cbm_family(const CbmParams& p) { return Family(std::make_shared<CbmModel>(p.n, p.m), p.mu); }

inline Family make_stars(const Graph& g, double mu) { return Family(std::make_shared<StarsModel>(g), mu); }

// One swap of object a with object b from the sibling leaf cluster.
struct CbmSwap {
  std::size_t a = 0;
  std::size_t b = 0;
  std::uint64_t neighbor = 0;
  double sq_distance = 0.0;
};

// All n*m/2 deepest-level swaps out of hypothesis j. For m = 2 each resulting
// neighbour is reached by two different swaps.
inline std::vector<CbmSwap> cbm_elementary_swaps(const Family& family, std::uint64_t j) {
  const auto* model = dynamic_cast<const CbmModel*>(&family.model());
  detail::require(model != nullptr, "elementary swaps need a CBM family");
  family.check_index(j);
  const std::size_t n = model->n(), m = model->m();
  std::vector<CbmSwap> swaps;
  if (n == m) return swaps;
  const auto& order = model->order(j);
  for (std::size_t block = 0; block < n / m; block += 2) {
    for (std::size_t pa = block * m; pa < (block + 1) * m; ++pa)
      for (std::size_t pb = (block + 1) * m; pb < (block + 2) * m; ++pb) {
        auto swapped = order;
        std::swap(swapped[pa], swapped[pb]);
        const std::uint64_t neighbor = model->index_of(swapped);
        swaps.push_back({order[pa], order[pb], neighbor, family.sq_distance(j, neighbor)});
      }
  }
  return swaps;
}

// Coordinate permutations of a CBM family induced by adjacent object
// transpositions (x, x+1) acting on both indices of every pair.
inline PermutationSet cbm_object_transpositions(std::size_t n) {
  detail::require(n >= 2, "need at least two objects");
  auto coordinate = [n](std::size_t x, std::size_t y) { return x * (n - 1) + (y < x ? y : y - 1); };
  PermutationSet set{n * (n - 1), {}};
  for (std::size_t t = 0; t + 1 < n; ++t) {
    auto swap_obj = [t](std::size_t x) { return x == t ? t + 1 : (x == t + 1 ? t : x); };
    std::vector<std::size_t> p(n * (n - 1));
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (x != y) p[coordinate(x, y)] = coordinate(swap_obj(x), swap_obj(y));
    set.generators.push_back(std::move(p));
  }
  return set;
}

}  // namespace snm
