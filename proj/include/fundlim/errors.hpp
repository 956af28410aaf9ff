#pragma once

#include <stdexcept>
#include <string>

namespace fundlim {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed plant or disturbance description (bad dimensions, NaN/Inf, ...).
class InvalidModel : public Error {
 public:
  using Error::Error;
};

/// Every Markov parameter C A^i B vanishes, so the plant has no output gain.
class ZeroTransferFunction : public Error {
 public:
  using Error::Error;
};

/// The Rosenbrock pencil is singular and does not define a finite zero set.
class DegenerateRealization : public Error {
 public:
  using Error::Error;
};

/// Max-entropy density requested for a shape below one.
class UnsupportedShape : public Error {
 public:
  using Error::Error;
};

/// Norm order outside [1, inf].
class InvalidOrder : public Error {
 public:
  using Error::Error;
};

class SpectrumNotLogIntegrable : public Error {
 public:
  using Error::Error;
};

/// Every simulated trajectory diverged.
class UnstableLoop : public Error {
 public:
  using Error::Error;
};

/// A bound was checked against a loop that is not mean-square stable.
class CertificationRefused : public Error {
 public:
  using Error::Error;
};

/// Input file or argument could not be parsed or validated.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace fundlim
