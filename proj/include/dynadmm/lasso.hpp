#ifndef DYNADMM_LASSO_HPP_
#define DYNADMM_LASSO_HPP_

// Dynamic LASSO: minimize 1/2 ||F x - h||^2 + gamma ||x||_1 with A = I,
// B = -I, c = 0. F may be wide (m < p); F^T F is then singular but
// F^T F + rho I is always SPD, so no special handling is needed.

#include <cstdint>
#include <string>

#include "dynadmm/error.hpp"
#include "dynadmm/numerics.hpp"
#include "dynadmm/problem.hpp"
#include "dynadmm/solver.hpp"

namespace dynadmm {

struct LassoProblem {
  Matrix F;
  Vector h;
  double gamma = 1.0;

  Eigen::Index p() const noexcept { return F.cols(); }

  void validate() const {
    if (F.rows() != h.size() || F.cols() < 1) {
      throw StructuralError("LassoProblem: F is " + detail::shape_of(F) + " but h has length " +
                            std::to_string(h.size()));
    }
    if (!(gamma > 0.0)) throw DomainError("LassoProblem: gamma must be positive");
  }
};

inline ProblemInstance assemble(const LassoProblem& lp, std::int64_t k) {
  lp.validate();
  const auto p = lp.p();
  return ProblemInstance(k, LeastSquares{lp.F, lp.h}, ScaledL1{lp.gamma, p}, Matrix::Identity(p, p),
                         -Matrix::Identity(p, p), Vector::Zero(p));
}

inline double lasso_objective(const LassoProblem& lp, const Vector& x) {
  return 0.5 * (lp.F * x - lp.h).squaredNorm() + lp.gamma * x.lpNorm<1>();
}

/// x = (F^T F + rho I)^{-1} (F^T h + rho z - lambda).
inline Vector lasso_x_update(const AdmmState& state, const LassoProblem& lp, double rho) {
  if (!(rho > 0.0)) throw DomainError("lasso_x_update: rho must be positive");
  const auto p = lp.p();
  if (state.x.size() != p || state.z.size() != p || state.lambda.size() != p) {
    throw StructuralError("lasso_x_update: state does not match problem dimensions");
  }
  Matrix normal = lp.F.transpose() * lp.F;
  normal.diagonal().array() += rho;
  return SpdFactor(normal).solve(Vector(lp.F.transpose() * lp.h + rho * state.z - state.lambda));
}

/// z = S_{gamma/rho}(x_new + lambda / rho).
inline Vector lasso_z_update(const AdmmState& state, const LassoProblem& lp, double rho, const Vector& x_new) {
  if (!(rho > 0.0)) throw DomainError("lasso_z_update: rho must be positive");
  return soft_threshold(x_new + state.lambda / rho, lp.gamma / rho);
}

}  // namespace dynadmm

#endif  // DYNADMM_LASSO_HPP_
