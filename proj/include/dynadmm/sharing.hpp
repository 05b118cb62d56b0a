#ifndef DYNADMM_SHARING_HPP_
#define DYNADMM_SHARING_HPP_

// Dynamic sharing problem
//
//   minimize  sum_i (x_i - theta_i)^T Phi_i (x_i - theta_i) + gamma || sum_i x_i ||_1
//
// posed as f(x) + g(z) with A = [I_p ... I_p], B = -I_p, c = 0.

#include <cstdint>
#include <string>
#include <vector>

#include "dynadmm/error.hpp"
#include "dynadmm/numerics.hpp"
#include "dynadmm/problem.hpp"
#include "dynadmm/solver.hpp"

namespace dynadmm {

struct SharingBlock {
  Matrix phi;
  Vector theta;
};

struct SharingProblem {
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  std::vector<SharingBlock> blocks;
  double gamma = 1.0;

  void validate() const {
    if (n < 1 || p < 1) throw StructuralError("SharingProblem: n and p must be >= 1");
    if (static_cast<Eigen::Index>(blocks.size()) != n) {
      throw StructuralError("SharingProblem: expected " + std::to_string(n) + " blocks, got " +
                            std::to_string(blocks.size()));
    }
    if (!(gamma > 0.0)) throw DomainError("SharingProblem: gamma must be positive");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const auto& b = blocks[i];
      if (b.phi.rows() != p || b.phi.cols() != p || b.theta.size() != p) {
        throw StructuralError("SharingProblem: block " + std::to_string(i) + " has wrong shape");
      }
      try {
        SpdFactor check(b.phi);
      } catch (const NumericalError& e) {
        throw NumericalError("SharingProblem: Phi of block " + std::to_string(i) + ": " + e.what());
      }
    }
  }
};

/// [I_p, ..., I_p], p x np.
inline Matrix sharing_coupling(Eigen::Index n, Eigen::Index p) {
  Matrix A(p, n * p);
  for (Eigen::Index i = 0; i < n; ++i) A.middleCols(i * p, p).setIdentity();
  return A;
}

/// Block-diagonal Phi and stacked theta.
inline QuadraticForm stacked_quadratic(const SharingProblem& sp) {
  const auto N = sp.n * sp.p;
  QuadraticForm q{Matrix::Zero(N, N), Vector(N)};
  for (Eigen::Index i = 0; i < sp.n; ++i) {
    q.phi.block(i * sp.p, i * sp.p, sp.p, sp.p) = sp.blocks[i].phi;
    q.theta.segment(i * sp.p, sp.p) = sp.blocks[i].theta;
  }
  return q;
}

inline ProblemInstance assemble(const SharingProblem& sp, std::int64_t k) {
  sp.validate();
  const auto p = sp.p;
  return ProblemInstance(k, stacked_quadratic(sp), ScaledL1{sp.gamma, p}, sharing_coupling(sp.n, p),
                         -Matrix::Identity(p, p), Vector::Zero(p));
}

/// Objective written directly in per-subsystem form.
inline double sharing_objective(const SharingProblem& sp, const Vector& x) {
  if (x.size() != sp.n * sp.p) throw StructuralError("sharing_objective: x has wrong length");
  double total = 0.0;
  Vector sum = Vector::Zero(sp.p);
  for (Eigen::Index i = 0; i < sp.n; ++i) {
    const Vector d = x.segment(i * sp.p, sp.p) - sp.blocks[i].theta;
    total += d.dot(sp.blocks[i].phi * d);
    sum += x.segment(i * sp.p, sp.p);
  }
  return total + sp.gamma * sum.lpNorm<1>();
}

enum class SharingSolve {
  /// One np x np Cholesky solve of 2 Phi + rho A^T A.
  Direct,
  /// Woodbury reduction to n per-block p x p solves plus one p x p solve.
  Structured,
};

/// x = (2 Phi + rho A^T A)^{-1} (2 Phi theta - A^T lambda + rho A^T z).
inline Vector sharing_x_update(const AdmmState& state, const SharingProblem& sp, double rho,
                               SharingSolve method = SharingSolve::Direct) {
  if (!(rho > 0.0)) throw DomainError("sharing_x_update: rho must be positive");
  const auto n = sp.n;
  const auto p = sp.p;
  if (state.x.size() != n * p || state.z.size() != p || state.lambda.size() != p) {
    throw StructuralError("sharing_x_update: state does not match problem dimensions");
  }
  // A^T (rho z - lambda) repeats the same p-vector in every block.
  const Vector shared = rho * state.z - state.lambda;

  if (method == SharingSolve::Direct) {
    const auto N = n * p;
    Matrix normal = Matrix::Zero(N, N);
    Vector rhs(N);
    for (Eigen::Index i = 0; i < n; ++i) {
      normal.block(i * p, i * p, p, p) = 2.0 * sp.blocks[i].phi;
      rhs.segment(i * p, p) = 2.0 * (sp.blocks[i].phi * sp.blocks[i].theta) + shared;
      for (Eigen::Index j = 0; j < n; ++j) normal.block(i * p, j * p, p, p).diagonal().array() += rho;
    }
    return detail::factor_normal(normal, "sharing_x_update").solve(rhs);
  }

  // (D + rho U U^T)^{-1} r = D^{-1} r - D^{-1} U (I/rho + U^T D^{-1} U)^{-1} U^T D^{-1} r
  // with D = blockdiag(2 Phi_i) and U = [I_p; ...; I_p].
  std::vector<SpdFactor> block_factors;
  block_factors.reserve(static_cast<std::size_t>(n));
  Vector x(n * p);
  Matrix capacitance = Matrix::Identity(p, p) / rho;
  Vector reduced = Vector::Zero(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const SharingBlock& b = sp.blocks[i];
    block_factors.push_back(detail::factor_normal(2.0 * b.phi, "sharing_x_update"));
    const Vector y = block_factors.back().solve(Vector(2.0 * (b.phi * b.theta) + shared));
    x.segment(i * p, p) = y;
    reduced += y;
    capacitance += block_factors.back().solve(Matrix(Matrix::Identity(p, p)));
  }
  const Vector w = detail::factor_normal(0.5 * (capacitance + capacitance.transpose()), "sharing_x_update")
                       .solve(reduced);
  for (Eigen::Index i = 0; i < n; ++i) x.segment(i * p, p) -= block_factors[i].solve(w);
  return x;
}

}  // namespace dynadmm

#endif  // DYNADMM_SHARING_HPP_
