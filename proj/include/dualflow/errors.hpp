#pragma once

#include <stdexcept>
#include <string>

namespace dualflow {

/// Bad caller input: non-finite values, inconsistent sizes, degenerate ranges.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Data that does not fit the computational domain (atoms on or outside the grid, supports touching
/// the boundary).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// The requested operation is not defined for this flux model (e.g. the aggregate oracle with a
/// non-attractive velocity).
class RefusedError : public std::logic_error {
 public:
  explicit RefusedError(const std::string& what) : std::logic_error(what) {}
};

/// NaN/Inf produced during a computation, or an event loop that does not terminate.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dualflow
