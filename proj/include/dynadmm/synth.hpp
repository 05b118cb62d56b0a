#ifndef DYNADMM_SYNTH_HPP_
#define DYNADMM_SYNTH_HPP_

// Seeded generators for the synthetic problem streams: drifting sharing
// problems, drifting LASSO problems with a sparse ground truth, and a fully
// quadratic family on which the convergence bounds apply.
//
// All uniform draws are on [-1, 1] unless stated otherwise. Symmetric random
// matrices draw the upper triangle (diagonal included) and mirror it.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "dynadmm/error.hpp"
#include "dynadmm/lasso.hpp"
#include "dynadmm/numerics.hpp"
#include "dynadmm/problem.hpp"
#include "dynadmm/rng.hpp"
#include "dynadmm/sharing.hpp"

namespace dynadmm {

struct SharingStreamConfig {
  Eigen::Index n = 20;
  Eigen::Index p = 5;
  double eta = 0.2;
  double epsilon = 1.0;

  void validate() const {
    if (n < 1 || p < 1) throw DomainError("SharingStreamConfig: n and p must be >= 1");
    if (!(eta >= 0.0)) throw DomainError("SharingStreamConfig: eta must be nonnegative");
    if (!(epsilon > 0.0)) throw DomainError("SharingStreamConfig: epsilon must be positive");
  }
};

struct LassoStreamConfig {
  Eigen::Index m = 10;
  Eigen::Index p = 30;
  Eigen::Index q = 2;
  double eta = 0.01;
  double sigma = 0.1;

  void validate() const {
    if (m < 1 || p < 1) throw DomainError("LassoStreamConfig: m and p must be >= 1");
    if (q < 1 || q > p) throw DomainError("LassoStreamConfig: need 1 <= q <= p");
    if (!(eta >= 0.0)) throw DomainError("LassoStreamConfig: eta must be nonnegative");
    if (!(sigma >= 0.0)) throw DomainError("LassoStreamConfig: sigma must be nonnegative");
  }
};

/// Sparse ground truth; `support` holds 0-based indices in ascending order.
struct GroundTruth {
  std::vector<Eigen::Index> support;
  Vector values;
};

inline Vector uniform_vector(Eigen::Index n, RngStream& rng) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(-1.0, 1.0);
  return v;
}

inline Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

inline Matrix symmetric_uniform(Eigen::Index p, RngStream& rng) {
  Matrix e(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i; j < p; ++j) {
      e(i, j) = rng.uniform(-1.0, 1.0);
      e(j, i) = e(i, j);
    }
  }
  return e;
}

/// M if lambda_min(M) >= eps, else M + (eps - lambda_min(M)) I.
inline Matrix apply_eigen_floor(const Matrix& m, double eps) {
  const double lmin = min_eigenvalue_symmetric(m);
  if (lmin >= eps) return m;
  Matrix out = m;
  out.diagonal().array() += eps - lmin;
  return out;
}

inline Matrix init_phi(Eigen::Index p, double eps, RngStream& rng) {
  if (p < 1) throw DomainError("init_phi: p must be >= 1");
  return apply_eigen_floor(symmetric_uniform(p, rng), eps);
}

inline Vector init_theta(Eigen::Index p, RngStream& rng) {
  if (p < 1) throw DomainError("init_theta: p must be >= 1");
  return uniform_vector(p, rng);
}

inline Matrix next_phi(const Matrix& prev, double eta, double eps, RngStream& rng) {
  detail::require_symmetric(prev, "next_phi");
  return apply_eigen_floor(prev + eta * symmetric_uniform(prev.rows(), rng), eps);
}

inline Matrix next_phi(const Matrix& prev, const SharingStreamConfig& cfg, RngStream& rng) {
  return next_phi(prev, cfg.eta, cfg.epsilon, rng);
}

inline Vector next_theta(const Vector& prev, double eta, RngStream& rng) {
  return prev + eta * uniform_vector(prev.size(), rng);
}

inline Matrix next_F(const Matrix& prev, double eta, RngStream& rng) {
  return prev + eta * uniform_matrix(prev.rows(), prev.cols(), rng);
}

/// q distinct support indices; support entries uniform on [0, 1], others zero.
inline GroundTruth init_ground_truth(Eigen::Index p, Eigen::Index q, RngStream& rng) {
  if (q < 1 || q > p) throw DomainError("init_ground_truth: need 1 <= q <= p");
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < p; ++i) pool[static_cast<std::size_t>(i)] = i;
  // partial Fisher-Yates
  for (Eigen::Index i = 0; i < q; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(p - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  GroundTruth t;
  t.support.assign(pool.begin(), pool.begin() + q);
  std::sort(t.support.begin(), t.support.end());
  t.values = Vector::Zero(p);
  for (auto j : t.support) t.values(j) = rng.uniform(0.0, 1.0);
  return t;
}

/// Support entries move by eta * uniform[-1, 1]; off-support entries stay exactly zero.
inline GroundTruth next_ground_truth(const GroundTruth& prev, double eta, RngStream& rng) {
  GroundTruth t = prev;
  for (auto j : t.support) t.values(j) += eta * rng.uniform(-1.0, 1.0);
  return t;
}

/// h = F * truth + v with v ~ N(0, sigma^2 I).
inline Vector sample_h(const Matrix& F, const GroundTruth& truth, double sigma, RngStream& rng) {
  if (F.cols() != truth.values.size()) throw StructuralError("sample_h: F and ground truth disagree on p");
  if (!(sigma >= 0.0)) throw DomainError("sample_h: sigma must be nonnegative");
  Vector h = F * truth.values;
  for (Eigen::Index i = 0; i < h.size(); ++i) h(i) += sigma * rng.gaussian();
  return h;
}

/// Sharing problems for k = 1..steps; the k = 0 data only seeds the walk.
inline std::vector<SharingProblem> sharing_stream(const SharingStreamConfig& cfg, double gamma, std::int64_t steps,
                                                  RngStream& rng) {
  cfg.validate();
  SharingProblem sp{cfg.n, cfg.p, {}, gamma};
  sp.blocks.reserve(static_cast<std::size_t>(cfg.n));
  for (Eigen::Index i = 0; i < cfg.n; ++i) {
    Matrix phi = init_phi(cfg.p, cfg.epsilon, rng);
    Vector theta = init_theta(cfg.p, rng);
    sp.blocks.push_back({std::move(phi), std::move(theta)});
  }
  std::vector<SharingProblem> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(steps, 0)));
  for (std::int64_t k = 1; k <= steps; ++k) {
    for (auto& b : sp.blocks) {
      b.phi = next_phi(b.phi, cfg, rng);
      b.theta = next_theta(b.theta, cfg.eta, rng);
    }
    out.push_back(sp);
  }
  return out;
}

struct LassoSlice {
  LassoProblem problem;
  GroundTruth truth;
};

/// LASSO slices for k = 1..steps with their ground truth.
inline std::vector<LassoSlice> lasso_stream(const LassoStreamConfig& cfg, double gamma, std::int64_t steps,
                                            RngStream& rng) {
  cfg.validate();
  Matrix F = uniform_matrix(cfg.m, cfg.p, rng);
  GroundTruth truth = init_ground_truth(cfg.p, cfg.q, rng);
  std::vector<LassoSlice> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(steps, 0)));
  for (std::int64_t k = 1; k <= steps; ++k) {
    F = next_F(F, cfg.eta, rng);
    truth = next_ground_truth(truth, cfg.eta, rng);
    Vector h = sample_h(F, truth, cfg.sigma, rng);
    out.push_back({LassoProblem{F, std::move(h), gamma}, truth});
  }
  return out;
}

/// Fully quadratic family: f = (x - theta)^T Phi (x - theta), g = (z - zeta)^T Psi (z - zeta),
/// both drifting like the sharing blocks, with a fixed random A and c = 0.
/// B = -I unless `general_b`, in which case B is a fixed random nonsingular matrix.
struct QuadFamilyConfig {
  Eigen::Index p_x = 5;
  Eigen::Index p_z = 5;
  double eta = 0.1;
  double floor = 1.0;
  std::int64_t steps = 500;
  bool general_b = false;

  void validate() const {
    if (p_x < 1 || p_z < 1) throw DomainError("QuadFamilyConfig: dimensions must be >= 1");
    if (!(eta >= 0.0)) throw DomainError("QuadFamilyConfig: eta must be nonnegative");
    if (!(floor > 0.0)) throw DomainError("QuadFamilyConfig: floor must be positive");
    if (steps < 0) throw DomainError("QuadFamilyConfig: steps must be >= 0");
  }
};

inline std::vector<ProblemInstance> quad_family_stream(const QuadFamilyConfig& cfg, RngStream& rng) {
  cfg.validate();
  const auto rank = std::min(cfg.p_x, cfg.p_z);
  Matrix A;
  do {
    A = uniform_matrix(cfg.p_z, cfg.p_x, rng);
  } while (Eigen::JacobiSVD<Matrix>(A).singularValues()(rank - 1) < 0.1);
  Matrix B = -Matrix::Identity(cfg.p_z, cfg.p_z);
  if (cfg.general_b) {
    do {
      B = -Matrix::Identity(cfg.p_z, cfg.p_z) + 0.5 * uniform_matrix(cfg.p_z, cfg.p_z, rng);
    } while (min_singular_value(B) < 0.2);
  }
  Matrix phi = init_phi(cfg.p_x, cfg.floor, rng);
  Vector theta = init_theta(cfg.p_x, rng);
  Matrix psi = init_phi(cfg.p_z, cfg.floor, rng);
  Vector zeta = init_theta(cfg.p_z, rng);
  std::vector<ProblemInstance> out;
  out.reserve(static_cast<std::size_t>(cfg.steps));
  for (std::int64_t k = 1; k <= cfg.steps; ++k) {
    phi = next_phi(phi, cfg.eta, cfg.floor, rng);
    theta = next_theta(theta, cfg.eta, rng);
    psi = next_phi(psi, cfg.eta, cfg.floor, rng);
    zeta = next_theta(zeta, cfg.eta, rng);
    out.emplace_back(k, QuadraticForm{phi, theta}, QuadraticForm{psi, zeta}, A, B, Vector::Zero(cfg.p_z));
  }
  return out;
}

}  // namespace dynadmm

#endif  // DYNADMM_SYNTH_HPP_
