// SPDX-License-Identifier: Apache-2.0
//
// Common dense types and the error hierarchy shared by every module.

#ifndef CHAOSCS_CORE_HPP
#define CHAOSCS_CORE_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace chaoscs {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

using Vectord = VectorX<double>;
using Matrixd = MatrixX<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A trajectory left the finite numbers. Carries the integration time at
/// which the first non-finite component appeared.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class DegenerateSequenceError : public Error {
 public:
  using Error::Error;
};

class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// Theta * Theta^T is numerically singular (Theta lacks full row rank).
class SingularGramError : public Error {
 public:
  using Error::Error;
};

class ZeroColumnError : public Error {
 public:
  using Error::Error;
};

/// A brute-force enumeration would exceed the desk-scale guard.
class TooLargeError : public Error {
 public:
  using Error::Error;
};

class NoCrossingError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace chaoscs

#endif  // CHAOSCS_CORE_HPP
