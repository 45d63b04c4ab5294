#pragma once

// Observation model and maximum-likelihood decoding.
//
// Isotropic:  y ~ N(v_j, I_d).
// Design B:   y(i) = v_j(i) + B(i)^{-1/2} z_i, and y(i) = 0 when B(i) = 0.
// MLE:        argmin_j ||v_j - y||_B^2 (plain l2 when isotropic), ties to the
//             lowest index; coordinates with B(i) = 0 carry no weight.

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
#include "snm/rng.hpp"

namespace snm {

struct Observation {
  std::vector<double> y;
  std::optional<std::uint64_t> hypothesis;  // set when simulated
  std::optional<DesignStrategy> design;     // nullopt = isotropic
};

namespace detail {
inline void require_design_dimension(const std::optional<DesignStrategy>& design, std::size_t d) {
  if (design)
    require(design->dimension() == d, "design dimension " + std::to_string(design->dimension()) +
                                          " != family dimension " + std::to_string(d));
}
}  // namespace detail

// Draws y for hypothesis `mean` (already scaled) into `out`.
inline void draw_observation(std::span<const double> mean, const std::optional<DesignStrategy>& design,
                             RngStream& rng, std::span<double> out) {
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double z = rng.normal();
    if (!design) {
      out[i] = mean[i] + z;
    } else {
      const double b = (*design)[i];
      out[i] = b > 0.0 ? mean[i] + z / std::sqrt(b) : 0.0;
    }
  }
}

inline Observation sample_observation(const Family& family, std::uint64_t j,
                                      const std::optional<DesignStrategy>& design, RngStream& rng) {
  family.check_index(j);
  detail::require_design_dimension(design, family.dimension());
  const auto mean = family.vector(j);
  Observation obs{std::vector<double>(mean.size()), j, design};
  draw_observation(mean, design, rng, obs.y);
  return obs;
}

inline Observation sample_observation(const Family& family, std::uint64_t j,
                                      const std::optional<DesignStrategy>& design, RngHandle handle) {
  RngStream rng(handle);
  return sample_observation(family, j, design, rng);
}

// MLE over a materialized family. Construct once, decode many times.
class MleDecoder {
 public:
  MleDecoder(const Family& family, std::optional<DesignStrategy> design = std::nullopt)
      : vectors_(family.materialize()), design_(std::move(design)) {
    detail::require_design_dimension(design_, family.dimension());
  }

  const Matrix& vectors() const { return vectors_; }
  const std::optional<DesignStrategy>& design() const { return design_; }

  std::uint64_t decode(std::span<const double> y) const {
    detail::require(y.size() == vectors_.cols, "observation dimension " + std::to_string(y.size()) +
                                                   " != family dimension " + std::to_string(vectors_.cols));
    std::uint64_t best = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::uint64_t j = 0; j < vectors_.rows; ++j) {
      const auto v = vectors_.row(j);
      double dist = 0.0;
      if (!design_) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          const double diff = v[i] - y[i];
          dist += diff * diff;
        }
      } else {
        const auto w = design_->energies();
        for (std::size_t i = 0; i < v.size(); ++i) {
          const double diff = v[i] - y[i];
          dist += w[i] * diff * diff;
        }
      }
      if (dist < best_distance) {
        best_distance = dist;
        best = j;
      }
    }
    return best;
  }

 private:
  Matrix vectors_;
  std::optional<DesignStrategy> design_;
};

inline std::uint64_t mle_decode(const Family& family, const Observation& obs) {
  return MleDecoder(family, obs.design).decode(obs.y);
}

}  // namespace snm
