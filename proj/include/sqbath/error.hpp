#pragma once

#include <stdexcept>
#include <string>

namespace sqbath {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A label that does not belong to the Hilbert space it was looked up in.
class LabelError : public Error {
public:
  using Error::Error;
};

/// Operands living on different Hilbert spaces, or wrongly sized matrices.
class SpaceMismatch : public Error {
public:
  using Error::Error;
};

/// A parameter record or value violates a documented invariant.
class InvariantError : public Error {
public:
  using Error::Error;
};

/// A numerical procedure failed (singular solve, degenerate null space,
/// positivity breach in a propagated state, ...).
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Malformed configuration input (unknown key, unparsable number, ...).
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace sqbath
