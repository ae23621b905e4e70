#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qhm {

enum class ErrorKind {
  InvalidOperator,
  DimensionMismatch,
  NotHermitian,
  NotPositiveDefinite,
  ConvergenceFailure,
  ComplexSpectrum,
  Defective,
  NotQuasiHermitian,
  NotQuasiSelfAdjoint,
  NotInvolution,
  SpectrumNotConjugateClosed,
  IntertwiningViolated,
  InvalidSpec,
  SingularMetric,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(double min_eigenvalue, const std::string& what)
      : Error(ErrorKind::NotPositiveDefinite, what), min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Thrown when a positive metric cannot exist because some eigenvalue is
/// off the real axis. Carries the offending eigenvalues.
class ComplexSpectrum : public Error {
 public:
  ComplexSpectrum(std::vector<std::complex<double>> offending, const std::string& what)
      : Error(ErrorKind::ComplexSpectrum, what), offending_(std::move(offending)) {}

  const std::vector<std::complex<double>>& offending() const noexcept { return offending_; }

 private:
  std::vector<std::complex<double>> offending_;
};

}  // namespace qhm
