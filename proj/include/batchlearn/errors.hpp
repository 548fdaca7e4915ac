#pragma once

#include <stdexcept>
#include <string>

namespace batchlearn {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A series or expectation that does not converge for the requested
// parameters. `threshold()` is the boundary of the convergence domain.
class DivergenceError : public std::domain_error {
 public:
  DivergenceError(const std::string& what, double threshold)
      : std::domain_error(what), threshold_(threshold) {}
  double threshold() const noexcept { return threshold_; }

 private:
  double threshold_;
};

// The operation is well defined but not offered for this distribution.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Input too large for an enumeration-based routine.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Requested tolerance cannot be certified within the term cap.
class ToleranceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace batchlearn
