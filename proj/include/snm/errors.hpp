#pragma once

#include <stdexcept>
#include <string>

namespace snm {

// Bad arguments: out-of-range parameters, malformed specs, dimension mismatch.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// The request is well formed but exceeds what the library will do explicitly
// (e.g. materializing or scanning a family with too many hypotheses).
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace detail
}  // namespace snm
