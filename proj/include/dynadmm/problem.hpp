#ifndef DYNADMM_PROBLEM_HPP_
#define DYNADMM_PROBLEM_HPP_

// One time slice of the coupled problem
//
//   minimize f_k(x) + g_k(z)   subject to   A x + B z = c
//
// with f and g drawn from a closed set of three function families.
//
// Scaling conventions (they differ on purpose, do not "fix" one to match the
// other):
//   QuadraticForm  h(v) = (v - theta)^T Phi (v - theta)   no 1/2 factor, gradient 2 Phi (v - theta)
//   LeastSquares   h(v) = 1/2 ||F v - h||^2               1/2 factor,    gradient F^T (F v - h)
//   ScaledL1       h(v) = gamma ||v||_1                   nonsmooth

#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "dynadmm/error.hpp"
#include "dynadmm/numerics.hpp"

namespace dynadmm {

struct QuadraticForm {
  Matrix phi;
  Vector theta;
};

struct LeastSquares {
  Matrix F;
  Vector h;
};

struct ScaledL1 {
  double gamma = 1.0;
  Eigen::Index dim = 0;
};

using FunctionSpec = std::variant<QuadraticForm, LeastSquares, ScaledL1>;

inline Eigen::Index domain_dim(const FunctionSpec& spec) {
  return std::visit(
      [](const auto& s) -> Eigen::Index {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, QuadraticForm>) {
          return s.theta.size();
        } else if constexpr (std::is_same_v<T, LeastSquares>) {
          return s.F.cols();
        } else {
          return s.dim;
        }
      },
      spec);
}

inline bool is_smooth(const FunctionSpec& spec) { return !std::holds_alternative<ScaledL1>(spec); }

inline const char* variant_name(const FunctionSpec& spec) {
  switch (spec.index()) {
    case 0: return "QuadraticForm";
    case 1: return "LeastSquares";
    default: return "ScaledL1";
  }
}

/// Throws if the spec breaks its own invariants.
inline void validate(const FunctionSpec& spec) {
  if (const auto* q = std::get_if<QuadraticForm>(&spec)) {
    if (q->phi.rows() != q->theta.size() || q->phi.cols() != q->theta.size()) {
      throw StructuralError("QuadraticForm: Phi is " + detail::shape_of(q->phi) +
                            " but theta has length " + std::to_string(q->theta.size()));
    }
    if (!q->phi.allFinite() || !q->theta.allFinite()) {
      throw StructuralError("QuadraticForm: non-finite entries");
    }
    SpdFactor check(q->phi);  // throws NumericalError if Phi is not positive definite
  } else if (const auto* ls = std::get_if<LeastSquares>(&spec)) {
    if (ls->F.rows() != ls->h.size()) {
      throw StructuralError("LeastSquares: F is " + detail::shape_of(ls->F) + " but h has length " +
                            std::to_string(ls->h.size()));
    }
    if (!ls->F.allFinite() || !ls->h.allFinite()) {
      throw StructuralError("LeastSquares: non-finite entries");
    }
  } else {
    const auto& l1 = std::get<ScaledL1>(spec);
    if (!(l1.gamma > 0.0) || !std::isfinite(l1.gamma)) {
      throw DomainError("ScaledL1: gamma must be positive and finite");
    }
    if (l1.dim < 1) throw StructuralError("ScaledL1: domain dimension must be >= 1");
  }
}

namespace detail {
inline void require_dim(const FunctionSpec& spec, const Vector& v, const char* who) {
  if (v.size() != domain_dim(spec)) {
    throw StructuralError(std::string(who) + ": vector length " + std::to_string(v.size()) +
                          " does not match " + variant_name(spec) + " domain " +
                          std::to_string(domain_dim(spec)));
  }
}
}  // namespace detail

inline double evaluate(const FunctionSpec& spec, const Vector& v) {
  detail::require_dim(spec, v, "evaluate");
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, QuadraticForm>) {
          const Vector d = v - s.theta;
          return d.dot(s.phi * d);
        } else if constexpr (std::is_same_v<T, LeastSquares>) {
          return 0.5 * (s.F * v - s.h).squaredNorm();
        } else {
          return s.gamma * v.lpNorm<1>();
        }
      },
      spec);
}

inline Vector gradient(const FunctionSpec& spec, const Vector& v) {
  detail::require_dim(spec, v, "gradient");
  if (const auto* q = std::get_if<QuadraticForm>(&spec)) {
    return 2.0 * (q->phi * (v - q->theta));
  }
  if (const auto* ls = std::get_if<LeastSquares>(&spec)) {
    return ls->F.transpose() * (ls->F * v - ls->h);
  }
  throw UnsupportedError("gradient: ScaledL1 is nonsmooth");
}

/// Constant Hessian H of a smooth spec; the gradient is H v - linear_term(spec).
inline Matrix hessian(const FunctionSpec& spec) {
  if (const auto* q = std::get_if<QuadraticForm>(&spec)) return 2.0 * q->phi;
  if (const auto* ls = std::get_if<LeastSquares>(&spec)) return ls->F.transpose() * ls->F;
  throw UnsupportedError("hessian: ScaledL1 is nonsmooth");
}

inline Vector linear_term(const FunctionSpec& spec) {
  if (const auto* q = std::get_if<QuadraticForm>(&spec)) return 2.0 * (q->phi * q->theta);
  if (const auto* ls = std::get_if<LeastSquares>(&spec)) return ls->F.transpose() * ls->h;
  throw UnsupportedError("linear_term: ScaledL1 is nonsmooth");
}

/// Immutable time slice (f_k, g_k, A, B, c).
class ProblemInstance {
 public:
  ProblemInstance(std::int64_t k, FunctionSpec f, FunctionSpec g, Matrix A, Matrix B, Vector c)
      : k_(k), f_(std::move(f)), g_(std::move(g)), A_(std::move(A)), B_(std::move(B)), c_(std::move(c)) {
    if (k_ < 0) throw DomainError("ProblemInstance: time index must be >= 0");
    validate(f_);
    validate(g_);
    const auto M = c_.size();
    if (B_.rows() != B_.cols()) {
      throw StructuralError("ProblemInstance: B must be square, got " + detail::shape_of(B_));
    }
    if (B_.rows() != M || A_.rows() != M) {
      throw StructuralError("ProblemInstance: A (" + detail::shape_of(A_) + "), B (" + detail::shape_of(B_) +
                            ") and c (" + std::to_string(M) + ") disagree on constraint count");
    }
    if (A_.cols() != domain_dim(f_)) {
      throw StructuralError("ProblemInstance: A has " + std::to_string(A_.cols()) + " columns but f acts on R^" +
                            std::to_string(domain_dim(f_)));
    }
    if (domain_dim(g_) != M) {
      throw StructuralError("ProblemInstance: g acts on R^" + std::to_string(domain_dim(g_)) +
                            " but B is " + detail::shape_of(B_));
    }
    if (!A_.allFinite() || !B_.allFinite() || !c_.allFinite()) {
      throw StructuralError("ProblemInstance: non-finite constraint data");
    }
  }

  std::int64_t k() const noexcept { return k_; }
  const FunctionSpec& f() const noexcept { return f_; }
  const FunctionSpec& g() const noexcept { return g_; }
  const Matrix& A() const noexcept { return A_; }
  const Matrix& B() const noexcept { return B_; }
  const Vector& c() const noexcept { return c_; }

  /// x dimension.
  Eigen::Index N() const noexcept { return A_.cols(); }
  /// z, lambda dimension.
  Eigen::Index M() const noexcept { return c_.size(); }

  bool same_shape(const ProblemInstance& o) const noexcept { return N() == o.N() && M() == o.M(); }

  void check_point(const Vector& x, const Vector& z, const char* who) const {
    if (x.size() != N() || z.size() != M()) {
      throw StructuralError(std::string(who) + ": point dimensions (" + std::to_string(x.size()) + ", " +
                            std::to_string(z.size()) + ") do not match instance (" + std::to_string(N()) +
                            ", " + std::to_string(M()) + ")");
    }
  }

  void check_point(const Vector& x, const Vector& z, const Vector& lambda, const char* who) const {
    check_point(x, z, who);
    if (lambda.size() != M()) {
      throw StructuralError(std::string(who) + ": multiplier length " + std::to_string(lambda.size()) +
                            " does not match constraint count " + std::to_string(M()));
    }
  }

 private:
  std::int64_t k_;
  FunctionSpec f_;
  FunctionSpec g_;
  Matrix A_;
  Matrix B_;
  Vector c_;
};

/// A x + B z - c.
inline Vector constraint_residual(const ProblemInstance& inst, const Vector& x, const Vector& z) {
  inst.check_point(x, z, "constraint_residual");
  return inst.A() * x + inst.B() * z - inst.c();
}

inline double primal_residual(const ProblemInstance& inst, const Vector& x, const Vector& z) {
  return constraint_residual(inst, x, z).norm();
}

inline double augmented_lagrangian(const ProblemInstance& inst, const Vector& x, const Vector& z,
                                   const Vector& lambda, double rho) {
  if (!(rho > 0.0)) throw DomainError("augmented_lagrangian: rho must be positive");
  inst.check_point(x, z, lambda, "augmented_lagrangian");
  const Vector r = constraint_residual(inst, x, z);
  return evaluate(inst.f(), x) + evaluate(inst.g(), z) + lambda.dot(r) + 0.5 * rho * r.squaredNorm();
}

}  // namespace dynadmm

#endif  // DYNADMM_PROBLEM_HPP_
