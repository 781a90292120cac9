#pragma once

#include <stdexcept>
#include <string>

namespace tripose {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The 2x2 correction system is singular (collinear or collapsed triangle).
struct SingularGeometry : Error {
  using Error::Error;
};

/// The scaling retraction hit a pole of its gamma/lambda formulas.
struct PoleEncountered : Error {
  using Error::Error;
};

/// Base vertices coincide; the nearest retraction cannot scale the base.
struct DegenerateBase : Error {
  using Error::Error;
};

/// Vertices are collinear; no orientation frame can be extracted.
struct DegenerateTriangle : Error {
  using Error::Error;
};

/// Gauss-Newton normal equations are rank deficient beyond tolerance.
struct SingularNormalEquations : Error {
  using Error::Error;
};

/// Innovation covariance is numerically singular.
struct SingularInnovation : Error {
  using Error::Error;
};

/// Covariance is not positive definite even after jitter.
struct IndefiniteCovariance : Error {
  using Error::Error;
};

/// A solver produced a non-finite cost.
struct NonFiniteCost : Error {
  using Error::Error;
};

struct NonMonotonicTimestamps : Error {
  using Error::Error;
};

struct MisalignedTracks : Error {
  using Error::Error;
};

struct InvalidWaypoints : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& what, long line) : Error(what), line(line) {}
  long line{0};
};

}  // namespace tripose
