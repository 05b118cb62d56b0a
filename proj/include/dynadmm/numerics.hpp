#ifndef DYNADMM_NUMERICS_HPP_
#define DYNADMM_NUMERICS_HPP_

// Dense kernel shared by every other module: eigen-extremes of symmetric
// matrices, spectral norms, and SPD solves. Sizes are desk scale (<= 200),
// so eigen-extremes come from a full symmetric decomposition.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>
#include <string>

#include "dynadmm/error.hpp"

namespace dynadmm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative tolerance used to accept a matrix as symmetric.
inline constexpr double kSymmetryTolerance = 1e-10;

namespace detail {

inline std::string shape_of(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

inline void require_symmetric(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw StructuralError(std::string(who) + ": matrix is not square (" + shape_of(m) + ")");
  }
  if (m.size() == 0) {
    throw StructuralError(std::string(who) + ": matrix is empty");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= kSymmetryTolerance * scale)) {
    std::ostringstream os;
    os << who << ": matrix is not symmetric (max |M - M^T| = " << asym << ")";
    throw StructuralError(os.str());
  }
}

inline Vector symmetric_spectrum(const Matrix& m, const char* who) {
  require_symmetric(m, who);
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError(std::string(who) + ": symmetric eigensolver did not converge");
  }
  return es.eigenvalues();  // ascending
}

}  // namespace detail

/// Smallest eigenvalue of a symmetric matrix. Input is symmetrized first.
inline double min_eigenvalue_symmetric(const Matrix& m) {
  return detail::symmetric_spectrum(m, "min_eigenvalue_symmetric")(0);
}

/// Largest eigenvalue of a symmetric matrix. Input is symmetrized first.
inline double max_eigenvalue_symmetric(const Matrix& m) {
  const Vector ev = detail::symmetric_spectrum(m, "max_eigenvalue_symmetric");
  return ev(ev.size() - 1);
}

/// Largest singular value.
inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) {
    throw StructuralError("spectral_norm: matrix is empty");
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

/// Smallest singular value (zero for rank-deficient or non-square input).
inline double min_singular_value(const Matrix& m) {
  if (m.size() == 0) {
    throw StructuralError("min_singular_value: matrix is empty");
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return m.rows() == m.cols() ? s(s.size() - 1) : 0.0;
}

/// Cholesky factorization of an SPD matrix, kept as a value so repeated
/// solves against an unchanged matrix reuse it.
class SpdFactor {
 public:
  SpdFactor() = default;

  explicit SpdFactor(const Matrix& m) { compute(m); }

  void compute(const Matrix& m) {
    detail::require_symmetric(m, "SpdFactor");
    llt_.compute(0.5 * (m + m.transpose()));
    if (llt_.info() != Eigen::Success) {
      std::ostringstream os;
      os << "SpdFactor: matrix is not positive definite (smallest eigenvalue "
         << min_eigenvalue_symmetric(m) << ")";
      throw NumericalError(os.str());
    }
    dim_ = m.rows();
  }

  Eigen::Index dim() const noexcept { return dim_; }
  bool empty() const noexcept { return dim_ == 0; }

  Vector solve(const Vector& b) const {
    if (b.size() != dim_) {
      throw StructuralError("SpdFactor::solve: rhs length " + std::to_string(b.size()) +
                            " does not match matrix dimension " + std::to_string(dim_));
    }
    return llt_.solve(b);
  }

  Matrix solve(const Matrix& b) const {
    if (b.rows() != dim_) {
      throw StructuralError("SpdFactor::solve: rhs rows do not match matrix dimension");
    }
    return llt_.solve(b);
  }

 private:
  Eigen::LLT<Matrix> llt_;
  Eigen::Index dim_ = 0;
};

/// Solve M x = b for symmetric positive-definite M.
inline Vector solve_spd(const Matrix& m, const Vector& b) { return SpdFactor(m).solve(b); }

}  // namespace dynadmm

#endif  // DYNADMM_NUMERICS_HPP_
