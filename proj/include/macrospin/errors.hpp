#pragma once

#include <stdexcept>
#include <string>

namespace macrospin {

// Site or axis index outside the chain.
struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Input violates a documented precondition (norm, unit length, parity, ...).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Requested Hilbert space exceeds the configured maximum number of sites.
struct CapacityError : std::length_error {
  using std::length_error::length_error;
};

// Argument outside the mathematical domain of an operation (energy windows, target energies).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Eigensolver failure, weight underflow and other floating-point breakdowns.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace macrospin
