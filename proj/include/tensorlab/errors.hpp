#pragma once

#include <stdexcept>
#include <string>

namespace tensorlab {

// Precondition violated by the caller (bad shape, out-of-range parameter, ...).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// An operation would exceed a configured resource limit (materialization cap).
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tensorlab
