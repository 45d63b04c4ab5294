#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "snm/detail/combinatorics.hpp"
#include "snm/errors.hpp"

namespace snm {

// Nonnegative per-coordinate sensing energies B. Coordinate i is observed
// with noise variance 1 / B(i); B(i) = 0 means it is not observed at all.
class DesignStrategy {
 public:
  DesignStrategy() = default;

  explicit DesignStrategy(std::vector<double> energies) : energies_(std::move(energies)) {
    detail::require(!energies_.empty(), "design strategy must have at least one coordinate");
    for (std::size_t i = 0; i < energies_.size(); ++i)
      detail::require(std::isfinite(energies_[i]) && energies_[i] >= 0.0,
                      "design energy B(" + std::to_string(i) + ") must be finite and nonnegative");
  }

  // Also checks the energies sum to the declared budget (1e-9 relative).
  DesignStrategy(std::vector<double> energies, double declared_budget) : DesignStrategy(std::move(energies)) {
    const double tau = budget();
    detail::require(std::abs(tau - declared_budget) <= 1e-9 * std::max(1.0, std::abs(declared_budget)),
                    "design energies sum to " + std::to_string(tau) + ", declared budget is " +
                        std::to_string(declared_budget));
  }

  std::size_t dimension() const { return energies_.size(); }
  std::span<const double> energies() const { return energies_; }
  double operator[](std::size_t i) const { return energies_[i]; }

  double budget() const { return detail::pairwise_sum(energies_); }

 private:
  std::vector<double> energies_;
};

// B(i) = tau / d for every coordinate.
inline DesignStrategy uniform_design(std::size_t d, double tau) {
  detail::require(d >= 1, "uniform design needs d >= 1");
  detail::require(std::isfinite(tau) && tau > 0.0, "budget must be positive");
  return DesignStrategy(std::vector<double>(d, tau / static_cast<double>(d)));
}

}  // namespace snm
