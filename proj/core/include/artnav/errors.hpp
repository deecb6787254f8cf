#pragma once

#include <stdexcept>
#include <string>

namespace artnav {

/// Raised when an input file (map, weights, config, scenario) cannot be parsed.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a cost backend cannot produce a result for a query.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace artnav
