#pragma once

#include <stdexcept>
#include <string>

namespace curv {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A constructor input failed one of the algebraic curvature symmetries.
struct SymmetryViolation : Error {
  std::string identity;  // "antisymmetry", "pair symmetry", "first Bianchi"
  double residual;
  SymmetryViolation(std::string which, double res)
      : Error("symmetry violation: " + which +
              " (max residual " + std::to_string(res) + ")"),
        identity(std::move(which)), residual(res) {}
};

struct DimensionOutOfRange : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct DimensionNot4 : Error {
  using Error::Error;
};

/// l_{a,b} inversion hit a singular (a,b) pair.
struct SingularTransform : Error {
  double a, b;
  SingularTransform(double a_, double b_)
      : Error("l_{a,b} inversion singular at (a,b) = (" + std::to_string(a_) +
              ", " + std::to_string(b_) + ")"),
        a(a_), b(b_) {}
};

struct FrameNotOrthonormal : Error {
  using Error::Error;
};
struct NonpositiveScalar : Error {
  using Error::Error;
};
struct NotStrictlyPIC : Error {
  using Error::Error;
};
struct NotKahler : Error {
  using Error::Error;
};
struct NoBracket : Error {
  using Error::Error;
};
struct DegenerateDirection : Error {
  using Error::Error;
};
struct StepSizeUnderflow : Error {
  using Error::Error;
};
struct ShootingDivergence : Error {
  using Error::Error;
};
struct BoundaryNode : Error {
  using Error::Error;
};
struct BallExceedsGrid : Error {
  using Error::Error;
};
struct NonpositiveTau : Error {
  using Error::Error;
};

/// CLI / experiment configuration error; message names the offending field.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace curv
