#ifndef DYNADMM_METRICS_HPP_
#define DYNADMM_METRICS_HPP_

// Convergence-analysis quantities for dynamic ADMM and runtime audits of the
// tracking inequalities. Notation:
//   u = (z, lambda),  ||u||_C^2 = rho/2 ||B z||^2 + 1/(2 rho) ||lambda||^2
//   m, L      strong convexity / gradient Lipschitz constants of g
//   m_f       strong convexity constant of f
//   alpha     lambda_min(B^T B)
// A margin is RHS - LHS of an inequality; it is >= 0 exactly when the
// inequality holds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dynadmm/error.hpp"
#include "dynadmm/numerics.hpp"
#include "dynadmm/oracle.hpp"
#include "dynadmm/problem.hpp"
#include "dynadmm/solver.hpp"

namespace dynadmm {

/// Margins below this count as violations; the inequalities are exact in real
/// arithmetic so this only absorbs rounding.
inline constexpr double kMarginTolerance = -1e-9;

struct DualPair {
  Vector z;
  Vector lambda;

  static DualPair of(const AdmmState& s) { return {s.z, s.lambda}; }
  static DualPair of(const OptimalTriple& t) { return {t.z_star, t.lambda_star}; }

  DualPair operator-(const DualPair& o) const { return {z - o.z, lambda - o.lambda}; }
  DualPair operator+(const DualPair& o) const { return {z + o.z, lambda + o.lambda}; }
  DualPair operator*(double s) const { return {s * z, s * lambda}; }
};

class CNormContext {
 public:
  CNormContext(Matrix B, double rho) : B_(std::move(B)), rho_(rho) {
    if (!(rho_ > 0.0)) throw DomainError("CNormContext: rho must be positive");
    if (B_.rows() != B_.cols() || B_.size() == 0) throw StructuralError("CNormContext: B must be square");
    if (!(min_singular_value(B_) > 0.0)) throw StructuralError("CNormContext: B is singular");
  }

  const Matrix& B() const noexcept { return B_; }
  double rho() const noexcept { return rho_; }

  /// C = blockdiag(rho/2 B^T B, 1/(2 rho) I) as an explicit matrix.
  Matrix matrix() const {
    const auto M = B_.rows();
    Matrix C = Matrix::Zero(2 * M, 2 * M);
    C.topLeftCorner(M, M) = 0.5 * rho_ * (B_.transpose() * B_);
    C.bottomRightCorner(M, M) = Matrix::Identity(M, M) / (2.0 * rho_);
    return C;
  }

 private:
  Matrix B_;
  double rho_;
};

inline double c_norm(const DualPair& u, const CNormContext& ctx) {
  if (u.z.size() != ctx.B().rows() || u.lambda.size() != ctx.B().rows()) {
    throw StructuralError("c_norm: dual pair does not match B");
  }
  const double rho = ctx.rho();
  return std::sqrt(0.5 * rho * (ctx.B() * u.z).squaredNorm() + u.lambda.squaredNorm() / (2.0 * rho));
}

struct ConvexityConstants {
  double m = 0.0;       // strong convexity of g
  double m_f = 0.0;     // strong convexity of f
  double L = 0.0;       // Lipschitz constant of grad g
  double alpha = 0.0;   // lambda_min(B^T B)
  double norm_A = 0.0;  // ||A||_2
  double norm_B = 0.0;  // ||B||_2

  void validate() const {
    if (!(m > 0.0 && m_f > 0.0 && L > 0.0 && alpha > 0.0)) {
      throw DomainError("ConvexityConstants: m, m_f, L, alpha must be positive");
    }
    if (L < m) throw DomainError("ConvexityConstants: L must be >= m");
  }
};

struct DeltaParams {
  double t = 0.0;
  double delta = 0.0;
  double delta_max = 0.0;
  double t_star = 0.0;
};

/// delta(t) = min{ 2 m t / (rho ||B||^2), 2 alpha rho (1 - t) / L }.
inline double compute_delta(const ConvexityConstants& c, double rho, double t) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("compute_delta: t must lie in (0, 1)");
  if (!(rho > 0.0)) throw DomainError("compute_delta: rho must be positive");
  c.validate();
  return std::min(2.0 * c.m * t / (rho * c.norm_B * c.norm_B), 2.0 * c.alpha * rho * (1.0 - t) / c.L);
}

/// Maximizer t* = alpha rho^2 ||B||^2 / (m L + alpha rho^2 ||B||^2) and
/// delta_max = 2 m alpha rho / (m L + alpha rho^2 ||B||^2).
inline DeltaParams compute_delta_max(const ConvexityConstants& c, double rho) {
  if (!(rho > 0.0)) throw DomainError("compute_delta_max: rho must be positive");
  c.validate();
  const double b2 = c.norm_B * c.norm_B;
  const double denom = c.m * c.L + c.alpha * rho * rho * b2;
  DeltaParams d;
  d.t_star = c.alpha * rho * rho * b2 / denom;
  d.t = d.t_star;
  d.delta_max = 2.0 * c.m * c.alpha * rho / denom;
  d.delta = compute_delta(c, rho, d.t_star);
  return d;
}

/// d_k = sqrt(rho/2) ||B|| ||z*_{k-1} - z*_k|| + ||grad g_{k-1}(z*_{k-1}) - grad g_k(z*_k)|| / sqrt(2 rho alpha).
inline double drift(const Vector& z_star_prev, const Vector& z_star_cur, const FunctionSpec& g_prev,
                    const FunctionSpec& g_cur, const CNormContext& ctx, double alpha) {
  if (!is_smooth(g_prev) || !is_smooth(g_cur)) {
    throw UnsupportedError("drift: g must be smooth; use optimum_displacement for L1 streams");
  }
  if (!(alpha > 0.0)) throw DomainError("drift: alpha must be positive");
  const double rho = ctx.rho();
  const double norm_b = spectral_norm(ctx.B());
  const double dg = (gradient(g_prev, z_star_prev) - gradient(g_cur, z_star_cur)).norm();
  return std::sqrt(rho / 2.0) * norm_b * (z_star_prev - z_star_cur).norm() + dg / std::sqrt(2.0 * rho * alpha);
}

/// Surrogate reported for L1 streams, where the drift above is undefined:
/// sqrt(rho/2) ||B|| ||z*_{k-1} - z*_k||. Not a bound-carrying quantity.
inline double optimum_displacement(const Vector& z_star_prev, const Vector& z_star_cur, const CNormContext& ctx) {
  return std::sqrt(ctx.rho() / 2.0) * spectral_norm(ctx.B()) * (z_star_prev - z_star_cur).norm();
}

/// ||u_k - u*_k||_C <= ||u_{k-1} - u*_k||_C / sqrt(1 + delta).
inline double check_prop1(const DualPair& u_k, const DualPair& u_star_k, const DualPair& u_prev, double delta,
                          const CNormContext& ctx) {
  return c_norm(u_prev - u_star_k, ctx) / std::sqrt(1.0 + delta) - c_norm(u_k - u_star_k, ctx);
}

/// ||u_k - u*_k||_C <= (||u_{k-1} - u*_{k-1}||_C + d_k) / sqrt(1 + delta), k >= 2.
inline double check_thm1(const DualPair& u_k, const DualPair& u_star_k, const DualPair& u_prev,
                         const DualPair& u_star_prev, double delta, double d_k, const CNormContext& ctx,
                         std::int64_t k) {
  if (k < 2) throw DomainError("check_thm1: requires k >= 2");
  return (c_norm(u_prev - u_star_prev, ctx) + d_k) / std::sqrt(1.0 + delta) - c_norm(u_k - u_star_k, ctx);
}

/// Error norms of one iterate against its slice optimum.
struct ErrorNorms {
  double x = 0.0;
  double z = 0.0;
  double lambda = 0.0;
  double u_c = 0.0;
};

inline ErrorNorms error_norms(const AdmmState& s, const OptimalTriple& opt, const CNormContext& ctx) {
  return {(s.x - opt.x_star).norm(), (s.z - opt.z_star).norm(), (s.lambda - opt.lambda_star).norm(),
          c_norm(DualPair::of(s) - DualPair::of(opt), ctx)};
}

struct Thm2Margins {
  double x = 0.0;
  double z = 0.0;
  double lambda = 0.0;
};

/// ||z_k - z*_k|| <= sqrt(2 / (alpha rho)) ||u_k - u*_k||_C, any k >= 1.
inline double check_thm2_z(double z_err, double u_err_c, const ConvexityConstants& c, double rho) {
  return std::sqrt(2.0 / (c.alpha * rho)) * u_err_c - z_err;
}

/// ||lambda_k - lambda*_k|| <= sqrt(2 rho) ||u_k - u*_k||_C, any k >= 1.
inline double check_thm2_lambda(double lambda_err, double u_err_c, double rho) {
  return std::sqrt(2.0 * rho) * u_err_c - lambda_err;
}

/// ||x_k - x*_k|| <= ||A||/m_f [ (sqrt(2 rho) + ||B|| sqrt(2 rho/alpha)) ||u_k - u*_k||_C
///                              + ||B|| sqrt(2 rho/alpha) ||u_{k-1} - u*_{k-1}||_C + sqrt(2 rho) d_k ], k >= 2.
inline double check_thm2_x(double x_err, double u_err_c, double u_err_c_prev, const ConvexityConstants& c,
                           double rho, double d_k, std::int64_t k) {
  if (k < 2) throw DomainError("check_thm2_x: requires k >= 2");
  const double s2r = std::sqrt(2.0 * rho);
  const double b_term = c.norm_B * std::sqrt(2.0 * rho / c.alpha);
  return c.norm_A / c.m_f * ((s2r + b_term) * u_err_c + b_term * u_err_c_prev + s2r * d_k) - x_err;
}

inline Thm2Margins check_thm2(const ErrorNorms& e, double u_err_c_prev, const ConvexityConstants& c, double rho,
                              double d_k, std::int64_t k) {
  return {check_thm2_x(e.x, e.u_c, u_err_c_prev, c, rho, d_k, k), check_thm2_z(e.z, e.u_c, c, rho),
          check_thm2_lambda(e.lambda, e.u_c, rho)};
}

/// Asymptotic bounds on limsup of ||u - u*||_C, ||x - x*||, ||z - z*||, ||lambda - lambda*||
/// when d_k <= d for all k.
struct SteadyStateBounds {
  double u_c = 0.0;
  double x = 0.0;
  double z = 0.0;
  double lambda = 0.0;
};

inline SteadyStateBounds steady_state_bounds(double d, double delta, const ConvexityConstants& c, double rho) {
  if (!(delta > 0.0)) throw DomainError("steady_state_bounds: delta must be positive");
  if (!(d >= 0.0)) throw DomainError("steady_state_bounds: d must be nonnegative");
  const double gap = std::sqrt(1.0 + delta) - 1.0;
  const double s2r = std::sqrt(2.0 * rho);
  SteadyStateBounds b;
  b.u_c = d / gap;
  b.x = c.norm_A / c.m_f * ((s2r + c.norm_B * std::sqrt(8.0 * rho / c.alpha)) / gap + s2r) * d;
  b.z = std::sqrt(2.0 / (c.alpha * rho)) * b.u_c;
  b.lambda = s2r * b.u_c;
  return b;
}

/// ||x restricted to the complement of support||_2.
inline double sparsity_deviation(const Vector& x, std::span<const Eigen::Index> support) {
  std::vector<bool> on(static_cast<std::size_t>(x.size()), false);
  for (auto j : support) {
    if (j < 0 || j >= x.size()) {
      throw StructuralError("sparsity_deviation: support index " + std::to_string(j) + " out of range");
    }
    on[static_cast<std::size_t>(j)] = true;
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!on[static_cast<std::size_t>(i)]) s += x(i) * x(i);
  return std::sqrt(s);
}

/// Constants uniform over a finite stream of fully quadratic slices.
inline ConvexityConstants constants_from_stream(std::span<const ProblemInstance> stream) {
  if (stream.empty()) throw StructuralError("constants_from_stream: empty stream");
  ConvexityConstants c;
  c.m = c.m_f = std::numeric_limits<double>::infinity();
  c.L = 0.0;
  for (const auto& inst : stream) {
    const auto* f = std::get_if<QuadraticForm>(&inst.f());
    const auto* g = std::get_if<QuadraticForm>(&inst.g());
    if (f == nullptr || g == nullptr) {
      throw UnsupportedError("constants_from_stream: instance " + std::to_string(inst.k()) +
                             " is not fully quadratic");
    }
    c.m_f = std::min(c.m_f, 2.0 * min_eigenvalue_symmetric(f->phi));
    c.m = std::min(c.m, 2.0 * min_eigenvalue_symmetric(g->phi));
    c.L = std::max(c.L, 2.0 * max_eigenvalue_symmetric(g->phi));
  }
  const Matrix& B = stream.front().B();
  c.alpha = min_eigenvalue_symmetric(B.transpose() * B);
  c.norm_A = spectral_norm(stream.front().A());
  c.norm_B = spectral_norm(B);
  return c;
}

/// First index of the trailing window used to estimate a limsup: the final
/// `fraction` of the run, but at least `min_len` steps (or the whole run).
inline std::size_t trailing_window_start(std::size_t steps, double fraction = 0.25, std::size_t min_len = 100) {
  const auto len = std::min(steps, std::max(min_len, static_cast<std::size_t>(std::ceil(fraction * steps))));
  return steps - len;
}

/// Per-step audit row.
struct TrajectoryRecord {
  std::int64_t k = 0;
  AdmmState state;
  OptimalTriple optimum;
  ErrorNorms err;
  double drift = 0.0;
  double prop1_margin = 0.0;
  double thm1_margin = std::numeric_limits<double>::quiet_NaN();
  Thm2Margins thm2{std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0};
};

/// Audits a fully quadratic run. `states[i]` and `optima[i]` belong to
/// `stream[i]`; the run is assumed to start from the all-zeros state.
inline std::vector<TrajectoryRecord> audit_trajectory(std::span<const ProblemInstance> stream,
                                                      std::span<const AdmmState> states,
                                                      std::span<const OptimalTriple> optima,
                                                      const ConvexityConstants& consts, double rho, double delta) {
  if (states.size() != stream.size() || optima.size() != stream.size()) {
    throw StructuralError("audit_trajectory: stream, states and optima differ in length");
  }
  std::vector<TrajectoryRecord> out;
  if (stream.empty()) return out;
  const CNormContext ctx(stream.front().B(), rho);
  out.reserve(stream.size());
  const DualPair zero{Vector::Zero(stream.front().M()), Vector::Zero(stream.front().M())};
  for (std::size_t i = 0; i < stream.size(); ++i) {
    TrajectoryRecord r;
    r.k = static_cast<std::int64_t>(i) + 1;
    r.state = states[i];
    r.optimum = optima[i];
    r.err = error_norms(states[i], optima[i], ctx);
    const DualPair u_k = DualPair::of(states[i]);
    const DualPair u_star = DualPair::of(optima[i]);
    const DualPair u_prev = i == 0 ? zero : DualPair::of(states[i - 1]);
    r.prop1_margin = check_prop1(u_k, u_star, u_prev, delta, ctx);
    r.thm2.z = check_thm2_z(r.err.z, r.err.u_c, consts, rho);
    r.thm2.lambda = check_thm2_lambda(r.err.lambda, r.err.u_c, rho);
    if (i > 0) {
      r.drift = drift(optima[i - 1].z_star, optima[i].z_star, stream[i - 1].g(), stream[i].g(), ctx, consts.alpha);
      r.thm1_margin = check_thm1(u_k, u_star, u_prev, DualPair::of(optima[i - 1]), delta, r.drift, ctx, r.k);
      r.thm2.x = check_thm2_x(r.err.x, r.err.u_c, out.back().err.u_c, consts, rho, r.drift, r.k);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace dynadmm

#endif  // DYNADMM_METRICS_HPP_
