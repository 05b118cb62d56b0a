#ifndef DYNADMM_ERROR_HPP_
#define DYNADMM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace dynadmm {

/// Shape or index mismatch between operands.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Factorization breakdown or a matrix that should be positive definite but is not.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested operation is not defined for this function variant.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Scalar argument outside its admissible range.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative method hit its iteration cap before reaching tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual, long iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

}  // namespace dynadmm

#endif  // DYNADMM_ERROR_HPP_
