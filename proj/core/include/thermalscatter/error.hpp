#pragma once

#include <stdexcept>
#include <string>

namespace ts {

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Evaluation exactly at a singularity (ker and K0 at 0, kappa pair at x_c).
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Caller violated an interface contract (grid mismatch, non-orthonormal basis).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A documented precondition of an analytic statement does not hold.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An integral that should be finite grows without bound under refinement.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ts
