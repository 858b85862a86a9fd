#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace charflow {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation outside the domain of a function (e.g. gauge derivatives at 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a tangent plane passes through (or behind) the origin.
class StarShapeError : public Error {
 public:
  StarShapeError(const std::string& what, Eigen::VectorXd witness)
      : Error(what), witness_(std::move(witness)) {}
  const Eigen::VectorXd& witness() const noexcept { return witness_; }

 private:
  Eigen::VectorXd witness_;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Symplecticity or spectral symmetry lost beyond tolerance.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// A spectral quantity sits too close to a classification threshold.
class BoundaryError : public Error {
 public:
  BoundaryError(const std::string& what, double gap) : Error(what), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

/// A sampled path is too coarse to follow its spectral winding.
class SamplingError : public Error {
 public:
  using Error::Error;
};

class SectionError : public Error {
 public:
  using Error::Error;
};

/// Newton iteration failed; carries the residual history.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Wrong normal-form case for the requested operation.
class CaseError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Critical type number table violates the admissibility rules.
class TableError : public Error {
 public:
  using Error::Error;
};

/// A dossier lacks a field some check needs; `missing` names them.
class IncompleteDossierError : public Error {
 public:
  IncompleteDossierError(const std::string& what, std::vector<std::string> missing)
      : Error(what), missing_(std::move(missing)) {}
  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::string> missing_;
};

/// A theorem hypothesis the computation relies on is violated.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An orbit database or dossier file does not match the surface config.
class StaleDatabaseError : public Error {
 public:
  using Error::Error;
};

}  // namespace charflow
