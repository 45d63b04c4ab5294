#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace snm::detail {

// Exact C(n, k), or nullopt when the value does not fit in 64 bits.
inline std::optional<std::uint64_t> binomial_exact(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i stays integral at every step.
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(result);
}

// C(n, k) as a double; exact while the true value is below 2^53.
inline double binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0.0;
  if (auto exact = binomial_exact(n, k)) return static_cast<double>(*exact);
  if (k > n - k) k = n - k;
  return std::exp(std::lgamma(double(n) + 1) - std::lgamma(double(k) + 1) -
                  std::lgamma(double(n - k) + 1));
}

// Rank of a sorted k-subset in colexicographic order: sum_i C(c_i, i + 1).
inline std::uint64_t colex_rank(std::span<const std::size_t> subset) {
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < subset.size(); ++i) rank += *binomial_exact(subset[i], i + 1);
  return rank;
}

// Inverse of colex_rank over k-subsets of {0, ..., n-1}.
inline std::vector<std::size_t> colex_unrank(std::uint64_t rank, std::size_t n, std::size_t k) {
  std::vector<std::size_t> subset(k);
  std::size_t upper = n;
  for (std::size_t i = k; i-- > 0;) {
    // Largest c < upper with C(c, i + 1) <= rank.
    std::size_t c = upper - 1;
    while (*binomial_exact(c, i + 1) > rank) --c;
    subset[i] = c;
    rank -= *binomial_exact(c, i + 1);
    upper = c;
  }
  return subset;
}

// Pairwise (cascade) summation.
inline double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

inline bool is_power_of_two(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

inline std::size_t log2_exact(std::uint64_t x) {
  std::size_t r = 0;
  while (x > 1) {
    x >>= 1;
    ++r;
  }
  return r;
}

}  // namespace snm::detail
