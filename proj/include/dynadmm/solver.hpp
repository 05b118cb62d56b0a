#ifndef DYNADMM_SOLVER_HPP_
#define DYNADMM_SOLVER_HPP_

// Dynamic ADMM: one x -> z -> lambda pass per time slice, warm-started from
// the previous slice's iterate. Every subproblem is solved in closed form.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynadmm/error.hpp"
#include "dynadmm/numerics.hpp"
#include "dynadmm/problem.hpp"

namespace dynadmm {

struct AdmmState {
  Vector x;
  Vector z;
  Vector lambda;
  std::int64_t k = 0;

  static AdmmState zeros(Eigen::Index N, Eigen::Index M) {
    return {Vector::Zero(N), Vector::Zero(M), Vector::Zero(M), 0};
  }

  bool operator==(const AdmmState& o) const {
    return k == o.k && x.size() == o.x.size() && z.size() == o.z.size() && lambda.size() == o.lambda.size() &&
           x == o.x && z == o.z && lambda == o.lambda;
  }
};

enum class SolverMode { Dynamic, Static };

struct SolverConfig {
  double rho = 1.0;
  SolverMode mode = SolverMode::Dynamic;

  void validate() const {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("SolverConfig: rho must be positive");
  }
};

/// Entrywise proximal map of kappa * ||.||_1.
inline Vector soft_threshold(const Vector& a, double kappa) {
  if (!(kappa > 0.0)) throw DomainError("soft_threshold: kappa must be positive");
  Vector out(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double v = a(i);
    if (v > kappa) {
      out(i) = v - kappa;
    } else if (v < -kappa) {
      out(i) = v + kappa;
    } else {
      out(i) = 0.0;
    }
  }
  return out;
}

namespace detail {

inline void check_state(const AdmmState& s, const ProblemInstance& inst, const char* who) {
  inst.check_point(s.x, s.z, s.lambda, who);
}

inline void check_rho(double rho, const char* who) {
  if (!(rho > 0.0)) throw DomainError(std::string(who) + ": rho must be positive");
}

/// B == -I and c == 0 exactly: the only coupling for which the ScaledL1
/// z-subproblem has a soft-threshold closed form here.
inline bool is_negative_identity_coupling(const ProblemInstance& inst) {
  const auto M = inst.M();
  return inst.B() == -Matrix::Identity(M, M) && inst.c().isZero(0.0);
}

inline Matrix x_normal_matrix(const ProblemInstance& inst, double rho) {
  return hessian(inst.f()) + rho * (inst.A().transpose() * inst.A());
}

inline Matrix z_normal_matrix(const ProblemInstance& inst, double rho) {
  return hessian(inst.g()) + rho * (inst.B().transpose() * inst.B());
}

inline Vector x_rhs(const ProblemInstance& inst, const Vector& z_prev, const Vector& lambda_prev, double rho) {
  const Matrix& A = inst.A();
  return linear_term(inst.f()) - A.transpose() * lambda_prev + rho * (A.transpose() * (inst.c() - inst.B() * z_prev));
}

inline Vector z_rhs(const ProblemInstance& inst, const Vector& x_new, const Vector& lambda_prev, double rho) {
  const Matrix& B = inst.B();
  return linear_term(inst.g()) - B.transpose() * lambda_prev + rho * (B.transpose() * (inst.c() - inst.A() * x_new));
}

inline SpdFactor factor_normal(const Matrix& m, const char* who) {
  try {
    return SpdFactor(m);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(who) + ": normal matrix is singular or indefinite (" + e.what() + ")");
  }
}

inline void require_smooth_f(const ProblemInstance& inst, const char* who) {
  if (!is_smooth(inst.f())) throw UnsupportedError(std::string(who) + ": f must be QuadraticForm or LeastSquares");
}

inline void require_l1_closed_form(const ProblemInstance& inst, const char* who) {
  if (!is_negative_identity_coupling(inst)) {
    throw UnsupportedError(std::string(who) + ": ScaledL1 g has a closed-form z-update only for B = -I, c = 0");
  }
}

inline Vector l1_z_update(const ProblemInstance& inst, const Vector& x_new, const Vector& lambda_prev, double rho) {
  const double gamma = std::get<ScaledL1>(inst.g()).gamma;
  return soft_threshold(inst.A() * x_new + lambda_prev / rho, gamma / rho);
}

}  // namespace detail

/// argmin_x f(x) + lambda^T A x + rho/2 ||A x + B z - c||^2.
inline Vector x_update(const AdmmState& state, const ProblemInstance& inst, double rho) {
  detail::check_rho(rho, "x_update");
  detail::check_state(state, inst, "x_update");
  detail::require_smooth_f(inst, "x_update");
  const SpdFactor factor = detail::factor_normal(detail::x_normal_matrix(inst, rho), "x_update");
  return factor.solve(detail::x_rhs(inst, state.z, state.lambda, rho));
}

/// argmin_z g(z) + lambda^T B z + rho/2 ||B z + A x_new - c||^2.
inline Vector z_update(const AdmmState& state, const ProblemInstance& inst, double rho, const Vector& x_new) {
  detail::check_rho(rho, "z_update");
  detail::check_state(state, inst, "z_update");
  if (x_new.size() != inst.N()) throw StructuralError("z_update: x_new has wrong length");
  if (!is_smooth(inst.g())) {
    detail::require_l1_closed_form(inst, "z_update");
    return detail::l1_z_update(inst, x_new, state.lambda, rho);
  }
  const SpdFactor factor = detail::factor_normal(detail::z_normal_matrix(inst, rho), "z_update");
  return factor.solve(detail::z_rhs(inst, x_new, state.lambda, rho));
}

inline Vector dual_update(const AdmmState& state, const ProblemInstance& inst, double rho, const Vector& x_new,
                          const Vector& z_new) {
  detail::check_rho(rho, "dual_update");
  detail::check_state(state, inst, "dual_update");
  return state.lambda + rho * constraint_residual(inst, x_new, z_new);
}

/// One full x -> z -> lambda pass; returns the state with k incremented.
inline AdmmState step(const AdmmState& state, const ProblemInstance& inst, const SolverConfig& config) {
  config.validate();
  Vector x = x_update(state, inst, config.rho);
  Vector z = z_update(state, inst, config.rho, x);
  Vector lambda = dual_update(state, inst, config.rho, x, z);
  return {std::move(x), std::move(z), std::move(lambda), state.k + 1};
}

/// Runs one step per instance from the all-zeros state. Output i is the
/// iterate after processing stream[i].
inline std::vector<AdmmState> run_dynamic(std::span<const ProblemInstance> stream, const SolverConfig& config) {
  config.validate();
  if (config.mode != SolverMode::Dynamic) throw DomainError("run_dynamic: config.mode must be Dynamic");
  std::vector<AdmmState> out;
  if (stream.empty()) return out;
  out.reserve(stream.size());
  AdmmState state = AdmmState::zeros(stream.front().N(), stream.front().M());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (!stream[i].same_shape(stream.front())) {
      throw StructuralError("run_dynamic: instance " + std::to_string(i) + " has shape (" +
                            std::to_string(stream[i].N()) + ", " + std::to_string(stream[i].M()) +
                            "), stream started with (" + std::to_string(stream.front().N()) + ", " +
                            std::to_string(stream.front().M()) + ")");
    }
    state = step(state, stream[i], config);
    out.push_back(state);
  }
  return out;
}

/// Repeated ADMM passes over one fixed instance. The normal-matrix
/// factorizations are computed once at construction.
class StaticAdmm {
 public:
  StaticAdmm(const ProblemInstance& inst, double rho) : inst_(&inst), rho_(rho) {
    detail::check_rho(rho, "StaticAdmm");
    detail::require_smooth_f(inst, "StaticAdmm");
    x_factor_ = detail::factor_normal(detail::x_normal_matrix(inst, rho), "StaticAdmm");
    x_linear_ = linear_term(inst.f());
    if (is_smooth(inst.g())) {
      z_factor_ = detail::factor_normal(detail::z_normal_matrix(inst, rho), "StaticAdmm");
      z_linear_ = linear_term(inst.g());
    } else {
      detail::require_l1_closed_form(inst, "StaticAdmm");
    }
  }

  const ProblemInstance& instance() const noexcept { return *inst_; }
  double rho() const noexcept { return rho_; }

  AdmmState step(const AdmmState& s) const {
    const Matrix& A = inst_->A();
    const Matrix& B = inst_->B();
    const Vector& c = inst_->c();
    Vector x = x_factor_.solve(Vector(x_linear_ - A.transpose() * s.lambda + rho_ * (A.transpose() * (c - B * s.z))));
    Vector z;
    if (z_factor_.empty()) {
      z = detail::l1_z_update(*inst_, x, s.lambda, rho_);
    } else {
      z = z_factor_.solve(Vector(z_linear_ - B.transpose() * s.lambda + rho_ * (B.transpose() * (c - A * x))));
    }
    Vector lambda = s.lambda + rho_ * (A * x + B * z - c);
    return {std::move(x), std::move(z), std::move(lambda), s.k + 1};
  }

 private:
  const ProblemInstance* inst_;
  double rho_;
  SpdFactor x_factor_;
  SpdFactor z_factor_;
  Vector x_linear_;
  Vector z_linear_;
};

// Subproblem optimality audits. `prev` is the state the step started from.

/// Gradient of the x-subproblem objective at x_new (zero at the exact minimizer).
inline Vector x_subproblem_gradient(const AdmmState& prev, const ProblemInstance& inst, double rho,
                                    const Vector& x_new) {
  const Vector r = inst.A() * x_new + inst.B() * prev.z - inst.c();
  return gradient(inst.f(), x_new) + inst.A().transpose() * (prev.lambda + rho * r);
}

/// Largest violation of the z-subproblem optimality condition at z_new:
/// gradient norm (smooth g) or subgradient-membership gap (ScaledL1).
inline double z_subproblem_violation(const AdmmState& prev, const ProblemInstance& inst, double rho,
                                     const Vector& x_new, const Vector& z_new, double zero_threshold = 1e-9) {
  const Vector r = inst.A() * x_new + inst.B() * z_new - inst.c();
  const Vector smooth_grad = inst.B().transpose() * (prev.lambda + rho * r);
  if (is_smooth(inst.g())) return (gradient(inst.g(), z_new) + smooth_grad).lpNorm<Eigen::Infinity>();
  const double gamma = std::get<ScaledL1>(inst.g()).gamma;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < z_new.size(); ++i) {
    const double gi = smooth_grad(i);
    const double v = std::abs(z_new(i)) <= zero_threshold ? std::max(0.0, std::abs(gi) - gamma)
                                                          : std::abs(gi + gamma * (z_new(i) > 0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace dynadmm

#endif  // DYNADMM_SOLVER_HPP_
