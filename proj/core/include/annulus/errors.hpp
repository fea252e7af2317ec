#pragma once

#include <stdexcept>
#include <string>

namespace annulus {

// Malformed or non-finite input data.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An operation needed an inverse that could not be certified.
class InvertibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pole of a rational function sits on (or too close to) the spectrum.
class PoleCollisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain where an operation is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A precondition that the caller promised (e.g. commutativity) is violated.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Support of a lazily shifted sequence reached the edge of its window.
class WindowOverflowError : public std::runtime_error {
 public:
  WindowOverflowError(const std::string& what, long required_half_width)
      : std::runtime_error(what), required_half_width_(required_half_width) {}

  long required_half_width() const noexcept { return required_half_width_; }

 private:
  long required_half_width_;
};

}  // namespace annulus
