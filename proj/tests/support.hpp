#ifndef DYNADMM_TESTS_SUPPORT_HPP_
#define DYNADMM_TESTS_SUPPORT_HPP_

// Random instance builders and independent reference computations shared by
// the test binaries. Nothing here calls into the library's solvers.

#include <cmath>
#include <cstdint>
#include <vector>

#include "dynadmm/dynadmm.hpp"

namespace testing_support {

using dynadmm::Matrix;
using dynadmm::RngStream;
using dynadmm::Vector;

inline Matrix random_matrix(Eigen::Index r, Eigen::Index c, RngStream& rng) {
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

inline Vector random_vector(Eigen::Index n, RngStream& rng, double scale = 1.0) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * rng.uniform(-1.0, 1.0);
  return v;
}

inline Matrix random_symmetric(Eigen::Index n, RngStream& rng) {
  const Matrix g = random_matrix(n, n, rng);
  return 0.5 * (g + g.transpose());
}

/// G G^T + shift I: SPD with smallest eigenvalue at least `shift`.
inline Matrix random_spd(Eigen::Index n, RngStream& rng, double shift = 0.5) {
  const Matrix g = random_matrix(n, n, rng);
  Matrix m = g * g.transpose();
  m.diagonal().array() += shift;
  return 0.5 * (m + m.transpose());
}

/// Cofactor expansion along the first row; fine for n <= 5.
inline double cofactor_det(const Matrix& m) {
  const auto n = m.rows();
  if (n == 0) return 1.0;
  if (n == 1) return m(0, 0);
  double det = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Matrix minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      Eigen::Index cc = 0;
      for (Eigen::Index c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = m(r, c);
      }
    }
    det += ((j % 2 == 0) ? 1.0 : -1.0) * m(0, j) * cofactor_det(minor);
  }
  return det;
}

/// Number of eigenvalues of symmetric m below t: sign changes in the
/// sequence of leading principal minors of m - t I.
inline int eigenvalues_below(const Matrix& m, double t) {
  const auto n = m.rows();
  const Matrix shifted = m - t * Matrix::Identity(n, n);
  double prev = 1.0;
  int changes = 0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double d = cofactor_det(shifted.topLeftCorner(k, k));
    if ((d < 0) != (prev < 0)) ++changes;
    prev = d;
  }
  return changes;
}

/// Smallest eigenvalue by bisection on the characteristic-polynomial inertia count.
inline double bisect_min_eigenvalue(const Matrix& m, double tol = 1e-12) {
  double bound = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) bound = std::max(bound, m.row(i).cwiseAbs().sum());
  double lo = -bound - 1.0, hi = bound + 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (eigenvalues_below(m, mid) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Gaussian elimination with partial pivoting; an independent linear solver.
inline Vector gauss_solve(Matrix a, Vector b) {
  const auto n = a.rows();
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    a.row(col).swap(a.row(piv));
    std::swap(b(col), b(piv));
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      a.row(r) -= f * a.row(col);
      b(r) -= f * b(col);
    }
  }
  Vector x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double s = b(i);
    for (Eigen::Index j = i + 1; j < n; ++j) s -= a(i, j) * x(j);
    x(i) = s / a(i, i);
  }
  return x;
}

/// Minimizes a strongly convex quadratic 1/2 v^T H v - r^T v by plain gradient
/// descent with step 1 / ||H||_F until the gradient falls below tol.
inline Vector gradient_descent_quadratic(const Matrix& H, const Vector& r, double tol = 1e-10) {
  const double step = 1.0 / H.norm();
  Vector v = Vector::Zero(r.size());
  for (long it = 0; it < 5'000'000; ++it) {
    const Vector g = H * v - r;
    if (g.lpNorm<Eigen::Infinity>() < tol) break;
    v -= step * g;
  }
  return v;
}

/// A random fully quadratic instance with f on R^N, g on R^M.
inline dynadmm::ProblemInstance random_quadratic_instance(Eigen::Index N, Eigen::Index M, RngStream& rng,
                                                          bool general_b = false) {
  Matrix B = -Matrix::Identity(M, M);
  if (general_b) {
    do {
      B = -Matrix::Identity(M, M) + 0.5 * random_matrix(M, M, rng);
    } while (dynadmm::min_singular_value(B) < 0.2);
  }
  return dynadmm::ProblemInstance(0, dynadmm::QuadraticForm{random_spd(N, rng), random_vector(N, rng)},
                                  dynadmm::QuadraticForm{random_spd(M, rng), random_vector(M, rng)},
                                  random_matrix(M, N, rng), B, random_vector(M, rng));
}

inline dynadmm::SharingProblem random_sharing(Eigen::Index n, Eigen::Index p, RngStream& rng, double gamma = 1.0) {
  dynadmm::SharingProblem sp{n, p, {}, gamma};
  for (Eigen::Index i = 0; i < n; ++i) sp.blocks.push_back({random_spd(p, rng), random_vector(p, rng)});
  return sp;
}

}  // namespace testing_support

#endif  // DYNADMM_TESTS_SUPPORT_HPP_
