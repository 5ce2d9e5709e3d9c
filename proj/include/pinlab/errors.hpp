#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pinlab {

// A caller supplied a parameter outside the documented domain.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A mathematical precondition of the operation is violated (e.g. lambda >= lambda0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical result could not be certified to the requested tolerance.
class PrecisionError : public std::runtime_error {
 public:
  PrecisionError(const std::string& what, std::size_t required_horizon = 0)
      : std::runtime_error(what), required_horizon_(required_horizon) {}

  // Horizon estimated to be sufficient, or 0 when not applicable.
  std::size_t required_horizon() const noexcept { return required_horizon_; }

 private:
  std::size_t required_horizon_;
};

// A named invariant failed; `invariant()` identifies it for reports.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(std::string invariant, const std::string& detail)
      : std::runtime_error(invariant + ": " + detail), invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

}  // namespace pinlab
