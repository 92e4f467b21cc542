#pragma once

#include <stdexcept>
#include <string>

namespace gct {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two events of different marks at the same instant.
class TieError : public Error {
 public:
  using Error::Error;
};

/// The actions already taken are not what the plan prescribes.
class PlanStateError : public Error {
 public:
  using Error::Error;
};

/// A simulated trajectory exceeded the scenario's event guard.
class ExplosionError : public Error {
 public:
  using Error::Error;
};

/// An observed event has zero probability under every latent state.
class SupportError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class NumericalUnderflow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Malformed scenario, plan, or configuration input.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace gct
