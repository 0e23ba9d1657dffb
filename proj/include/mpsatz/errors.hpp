#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mpsatz {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

class IndefiniteInput : public Error {
 public:
  IndefiniteInput(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

class MalformedInstance : public Error {
 public:
  using Error::Error;
};

class DegreeTooSmall : public Error {
 public:
  using Error::Error;
};

class RationalizationFailed : public Error {
 public:
  using Error::Error;
};

class RayNotVerifiable : public Error {
 public:
  using Error::Error;
};

class NotPsdOnLine : public Error {
 public:
  NotPsdOnLine(const std::string& what, double witness, double min_eigenvalue)
      : Error(what), witness_(witness), min_eigenvalue_(min_eigenvalue) {}
  /// A point z with lambda_min(f(z)) < -tol.
  double witness() const { return witness_; }
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double witness_;
  double min_eigenvalue_;
};

class NegativeSemidefiniteInput : public Error {
 public:
  using Error::Error;
};

class NonScalarGenerator : public Error {
 public:
  using Error::Error;
};

class SubstitutionMismatch : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace mpsatz
