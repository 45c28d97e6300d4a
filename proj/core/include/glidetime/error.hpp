#pragma once

#include <stdexcept>
#include <string>

namespace gt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed something outside an operation's domain (beta == 0,
/// out-of-range site, energy sitting on a spectrum, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iteration failed to converge or a numerical precondition could not be
/// established.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// GBZ with moduli on both sides of the unit circle.
class UnsupportedBipolar : public Error {
 public:
  using Error::Error;
};

/// Dominant-mode clustering produced a pattern the dynamic classifier does
/// not name (three or more frequency clusters).
class ClassificationAmbiguous : public Error {
 public:
  using Error::Error;
};

}  // namespace gt
