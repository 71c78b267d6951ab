#pragma once

#include <stdexcept>
#include <string>

namespace phoband {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A frequency sits too close to a pole of a permittivity model.
class PoleProximity : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

/// Opposite boundary edges of the unit cell cannot be paired vertex by vertex.
class NonMatchingBoundary : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// The factorization hit an exact zero pivot: the frequency is numerically an eigenvalue.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

class RegionNotAdmissible : public Error {
 public:
  using Error::Error;
};

/// Subdivision ran out of levels (or frontier capacity) before reaching the requested precision.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class AmbiguousTracking : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace phoband
