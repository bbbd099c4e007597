#pragma once

#include <stdexcept>
#include <string>

namespace mploc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configurations or cubes of incompatible (n, d).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A numeric parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// An operation's documented precondition does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Matrix dimension exceeds the configured site cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class ClassificationError : public Error {
 public:
  using Error::Error;
};

class DecompositionError : public Error {
 public:
  using Error::Error;
};

// Disorder realization does not cover the requested sites.
class CoverageError : public Error {
 public:
  using Error::Error;
};

class RegionError : public Error {
 public:
  using Error::Error;
};

// Energy too close to the spectrum for the resolvent to be evaluated.
class ResonanceError : public Error {
 public:
  ResonanceError(const std::string& what, double eta) : Error(what), eta_(eta) {}
  double eta() const noexcept { return eta_; }

 private:
  double eta_;
};

}  // namespace mploc
