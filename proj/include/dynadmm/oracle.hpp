#ifndef DYNADMM_ORACLE_HPP_
#define DYNADMM_ORACLE_HPP_

// Per-slice optimal points used as the tracking benchmark. Fully quadratic
// slices are solved from their KKT system directly; slices with an L1 term
// are solved by static ADMM run to a tight KKT residual.

#include <algorithm>
#include <optional>
#include <string>

#include "dynadmm/error.hpp"
#include "dynadmm/numerics.hpp"
#include "dynadmm/problem.hpp"
#include "dynadmm/solver.hpp"

namespace dynadmm {

enum class OracleMethod { ExactKkt, StaticAdmm };

struct OracleConfig {
  double tolerance = 1e-10;
  long max_iterations = 100000;
  OracleMethod method = OracleMethod::StaticAdmm;
  /// Penalty used by the static ADMM oracle, independent of the tracker's rho.
  double rho = 1.0;
  /// Coordinates with |z_i| at or below this count as zero in the L1 optimality test.
  double zero_threshold = 1e-9;

  void validate() const {
    if (!(tolerance > 0.0)) throw DomainError("OracleConfig: tolerance must be positive");
    if (max_iterations < 1) throw DomainError("OracleConfig: max_iterations must be >= 1");
    if (!(rho > 0.0)) throw DomainError("OracleConfig: rho must be positive");
  }
};

struct OptimalTriple {
  Vector x_star;
  Vector z_star;
  Vector lambda_star;
  double kkt_residual = 0.0;
  long iterations = 0;
};

/// Infinity-norm KKT violation: x stationarity, primal feasibility, and
/// z stationarity (gradient form for smooth g, subgradient gap for ScaledL1
/// with B = -I).
inline double kkt_residual(const ProblemInstance& inst, const Vector& x, const Vector& z, const Vector& lambda,
                           double zero_threshold = 1e-9) {
  inst.check_point(x, z, lambda, "kkt_residual");
  if (!is_smooth(inst.f())) throw UnsupportedError("kkt_residual: f must be smooth");
  double worst = (gradient(inst.f(), x) + inst.A().transpose() * lambda).lpNorm<Eigen::Infinity>();
  worst = std::max(worst, constraint_residual(inst, x, z).lpNorm<Eigen::Infinity>());
  if (is_smooth(inst.g())) {
    worst = std::max(worst, (gradient(inst.g(), z) + inst.B().transpose() * lambda).lpNorm<Eigen::Infinity>());
    return worst;
  }
  const auto M = inst.M();
  if (inst.B() != -Matrix::Identity(M, M)) {
    throw UnsupportedError("kkt_residual: ScaledL1 g is supported only with B = -I");
  }
  // 0 in gamma * d||z||_1 - lambda
  const double gamma = std::get<ScaledL1>(inst.g()).gamma;
  for (Eigen::Index i = 0; i < M; ++i) {
    const double v = std::abs(z(i)) <= zero_threshold ? std::max(0.0, std::abs(lambda(i)) - gamma)
                                                      : std::abs(lambda(i) - gamma * (z(i) > 0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst;
}

/// Solves grad f(x) + A^T lambda = 0, grad g(z) + B^T lambda = 0, A x + B z = c
/// for quadratic f, g by eliminating x and z:
///   (A Hf^{-1} A^T + B Hg^{-1} B^T) lambda = A Hf^{-1} rf + B Hg^{-1} rg - c.
inline OptimalTriple solve_exact_kkt(const ProblemInstance& inst) {
  if (!std::holds_alternative<QuadraticForm>(inst.f()) || !std::holds_alternative<QuadraticForm>(inst.g())) {
    throw UnsupportedError("solve_exact_kkt: f and g must both be QuadraticForm");
  }
  const Matrix& A = inst.A();
  const Matrix& B = inst.B();
  const SpdFactor hf(hessian(inst.f()));
  const SpdFactor hg(hessian(inst.g()));
  const Vector rf = linear_term(inst.f());
  const Vector rg = linear_term(inst.g());
  const Matrix hf_inv_at = hf.solve(Matrix(A.transpose()));
  const Matrix hg_inv_bt = hg.solve(Matrix(B.transpose()));
  Matrix schur = A * hf_inv_at + B * hg_inv_bt;
  schur = 0.5 * (schur + schur.transpose());
  SpdFactor schur_factor;
  try {
    schur_factor.compute(schur);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("solve_exact_kkt: KKT system is singular (") + e.what() + ")");
  }
  const Vector lambda = schur_factor.solve(Vector(A * hf.solve(rf) + B * hg.solve(rg) - inst.c()));
  OptimalTriple out;
  out.x_star = hf.solve(Vector(rf - A.transpose() * lambda));
  out.z_star = hg.solve(Vector(rg - B.transpose() * lambda));
  out.lambda_star = lambda;
  out.kkt_residual = kkt_residual(inst, out.x_star, out.z_star, out.lambda_star);
  return out;
}

/// Static ADMM on a fixed slice until the KKT residual reaches cfg.tolerance.
/// `warm_start` only changes the iteration count, not the point converged to.
inline OptimalTriple solve_static_admm(const ProblemInstance& inst, const OracleConfig& cfg,
                                       const std::optional<AdmmState>& warm_start = std::nullopt) {
  cfg.validate();
  const StaticAdmm admm(inst, cfg.rho);
  AdmmState s = warm_start ? *warm_start : AdmmState::zeros(inst.N(), inst.M());
  inst.check_point(s.x, s.z, s.lambda, "solve_static_admm");
  double res = 0.0;
  for (long it = 1; it <= cfg.max_iterations; ++it) {
    s = admm.step(s);
    res = kkt_residual(inst, s.x, s.z, s.lambda, cfg.zero_threshold);
    if (res <= cfg.tolerance) return {std::move(s.x), std::move(s.z), std::move(s.lambda), res, it};
  }
  throw ConvergenceError("solve_static_admm: no convergence in " + std::to_string(cfg.max_iterations) +
                             " iterations (KKT residual " + std::to_string(res) + ")",
                         res, cfg.max_iterations);
}

inline OptimalTriple solve_oracle(const ProblemInstance& inst, const OracleConfig& cfg,
                                  const std::optional<AdmmState>& warm_start = std::nullopt) {
  return cfg.method == OracleMethod::ExactKkt ? solve_exact_kkt(inst) : solve_static_admm(inst, cfg, warm_start);
}

}  // namespace dynadmm

#endif  // DYNADMM_ORACLE_HPP_
