#include <gtest/gtest.h>

#include "support.hpp"

using namespace dynadmm;
using namespace testing_support;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

/// Independent KKT solve: assemble the full symmetric indefinite system and
/// eliminate with partial pivoting.
Vector kkt_by_elimination(const ProblemInstance& inst) {
  const auto N = inst.N(), M = inst.M();
  Matrix K = Matrix::Zero(N + 2 * M, N + 2 * M);
  Vector r = Vector::Zero(N + 2 * M);
  K.block(0, 0, N, N) = hessian(inst.f());
  K.block(N, N, M, M) = hessian(inst.g());
  K.block(0, N + M, N, M) = inst.A().transpose();
  K.block(N, N + M, M, M) = inst.B().transpose();
  K.block(N + M, 0, M, N) = inst.A();
  K.block(N + M, N, M, M) = inst.B();
  r.segment(0, N) = linear_term(inst.f());
  r.segment(N, M) = linear_term(inst.g());
  r.segment(N + M, M) = inst.c();
  return gauss_solve(K, r);
}

}  // namespace

TEST(ExactKkt, ScalarHandSolve) {
  const ProblemInstance inst(0, QuadraticForm{scalar(1), vec({0})}, QuadraticForm{scalar(1), vec({0})}, scalar(1),
                             scalar(-1), vec({2}));
  const auto t = solve_exact_kkt(inst);
  EXPECT_NEAR(t.x_star(0), 1.0, 1e-14);
  EXPECT_NEAR(t.z_star(0), -1.0, 1e-14);
  EXPECT_NEAR(t.lambda_star(0), -2.0, 1e-14);
  EXPECT_LE(t.kkt_residual, 1e-12);
}

TEST(ExactKkt, OriginIsOptimal) {
  const ProblemInstance inst(0, QuadraticForm{Matrix::Identity(2, 2), Vector::Zero(2)},
                             QuadraticForm{Matrix::Identity(2, 2), Vector::Zero(2)}, Matrix::Identity(2, 2),
                             -Matrix::Identity(2, 2), Vector::Zero(2));
  const auto t = solve_exact_kkt(inst);
  EXPECT_TRUE(t.x_star.isZero(0.0));
  EXPECT_TRUE(t.z_star.isZero(0.0));
  EXPECT_TRUE(t.lambda_star.isZero(0.0));
}

TEST(ExactKkt, MatchesFullSystemElimination) {
  RngStream rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_quadratic_instance(5, 3, rng, trial % 2 == 1);
    const auto t = solve_exact_kkt(inst);
    const Vector ref = kkt_by_elimination(inst);
    EXPECT_LT((t.x_star - ref.segment(0, 5)).norm(), 1e-9);
    EXPECT_LT((t.z_star - ref.segment(5, 3)).norm(), 1e-9);
    EXPECT_LT((t.lambda_star - ref.segment(8, 3)).norm(), 1e-9);
    EXPECT_LT(t.kkt_residual, 1e-9);
  }
}

TEST(ExactKkt, RejectsNonQuadratic) {
  const ProblemInstance inst(0, QuadraticForm{scalar(1), vec({0})}, ScaledL1{1.0, 1}, scalar(1), scalar(-1),
                             vec({0}));
  EXPECT_THROW(solve_exact_kkt(inst), UnsupportedError);
}

TEST(StaticAdmm, ScalarLasso) {
  const ProblemInstance inst(0, LeastSquares{scalar(1), vec({2})}, ScaledL1{0.2, 1}, scalar(1), scalar(-1), vec({0}));
  const auto t = solve_static_admm(inst, OracleConfig{});
  EXPECT_NEAR(t.x_star(0), 1.8, 1e-9);
  EXPECT_NEAR(t.z_star(0), 1.8, 1e-9);
  EXPECT_NEAR(t.lambda_star(0), 0.2, 1e-9);
}

TEST(StaticAdmm, FullShrinkage) {
  RngStream rng(52);
  const Matrix F = random_matrix(5, 4, rng);
  const Vector h = random_vector(5, rng);
  const double gamma = (F.transpose() * h).lpNorm<Eigen::Infinity>() * 1.01;
  const ProblemInstance inst(0, LeastSquares{F, h}, ScaledL1{gamma, 4}, Matrix::Identity(4, 4),
                             -Matrix::Identity(4, 4), Vector::Zero(4));
  const auto t = solve_static_admm(inst, OracleConfig{});
  EXPECT_TRUE(t.z_star.isZero(0.0));
  EXPECT_LT(t.x_star.norm(), 1e-9);
}

TEST(StaticAdmm, ScalarLassoClosedFormFamily) {
  RngStream rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const double F = rng.uniform(0.2, 2.0) * (rng.below(2) ? 1.0 : -1.0);
    const double h = rng.uniform(-3.0, 3.0);
    const double gamma = rng.uniform(0.05, 1.5);
    const ProblemInstance inst(0, LeastSquares{scalar(F), vec({h})}, ScaledL1{gamma, 1}, scalar(1), scalar(-1),
                               vec({0}));
    const double a = F * h;
    const double shrunk = a > gamma ? a - gamma : (a < -gamma ? a + gamma : 0.0);
    const auto t = solve_static_admm(inst, OracleConfig{});
    EXPECT_NEAR(t.x_star(0), shrunk / (F * F), 1e-8);
  }
}

TEST(StaticAdmm, AgreesWithExactKkt) {
  RngStream rng(54);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_quadratic_instance(4, 3, rng, trial % 2 == 1);
    const auto a = solve_exact_kkt(inst);
    const auto b = solve_static_admm(inst, OracleConfig{});
    ASSERT_LT((a.x_star - b.x_star).lpNorm<Eigen::Infinity>(), 1e-7);
    ASSERT_LT((a.z_star - b.z_star).lpNorm<Eigen::Infinity>(), 1e-7);
    ASSERT_LT((a.lambda_star - b.lambda_star).lpNorm<Eigen::Infinity>(), 1e-7);
    ASSERT_LE(b.kkt_residual, 1e-10);
  }
}

TEST(StaticAdmm, WarmStartChangesOnlyIterationCount) {
  RngStream rng(55);
  const auto inst = random_quadratic_instance(4, 3, rng);
  const auto cold = solve_static_admm(inst, OracleConfig{});
  const AdmmState near{cold.x_star, cold.z_star, cold.lambda_star, 0};
  const auto warm = solve_static_admm(inst, OracleConfig{}, near);
  EXPECT_LE(warm.iterations, cold.iterations);
  EXPECT_LT((warm.x_star - cold.x_star).norm(), 1e-8);
}

TEST(StaticAdmm, ReportsNonConvergence) {
  RngStream rng(56);
  const auto inst = random_quadratic_instance(4, 3, rng);
  OracleConfig cfg;
  cfg.max_iterations = 2;
  try {
    solve_static_admm(inst, cfg);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.iterations(), 2);
    EXPECT_GT(e.residual(), cfg.tolerance);
  }
}

TEST(KktResidual, Cases) {
  const ProblemInstance inst(0, QuadraticForm{scalar(1), vec({0})}, QuadraticForm{scalar(1), vec({0})}, scalar(1),
                             scalar(-1), vec({2}));
  EXPECT_LE(kkt_residual(inst, vec({1}), vec({-1}), vec({-2})), 1e-12);
  // stationarity holds at (x, z, lambda) = (0.75, -0.75, -1.5), feasibility is off by 0.5
  EXPECT_NEAR(kkt_residual(inst, vec({0.75}), vec({-0.75}), vec({-1.5})), 0.5, 1e-15);
}

TEST(KktResidual, TermwiseRecomputation) {
  RngStream rng(57);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_quadratic_instance(3, 2, rng, true);
    const Vector x = random_vector(3, rng), z = random_vector(2, rng), l = random_vector(2, rng);
    const auto& f = std::get<QuadraticForm>(inst.f());
    const auto& g = std::get<QuadraticForm>(inst.g());
    const double r1 = (2 * f.phi * (x - f.theta) + inst.A().transpose() * l).cwiseAbs().maxCoeff();
    const double r2 = (inst.A() * x + inst.B() * z - inst.c()).cwiseAbs().maxCoeff();
    const double r3 = (2 * g.phi * (z - g.theta) + inst.B().transpose() * l).cwiseAbs().maxCoeff();
    EXPECT_NEAR(kkt_residual(inst, x, z, l), std::max({r1, r2, r3}), 1e-14);
  }
}

TEST(KktResidual, L1SubgradientGap) {
  const ProblemInstance inst(0, QuadraticForm{Matrix::Identity(2, 2), Vector::Zero(2)}, ScaledL1{1.0, 2},
                             Matrix::Identity(2, 2), -Matrix::Identity(2, 2), Vector::Zero(2));
  // x = z, stationarity in x forces lambda = -2x; pick x = z = (0.5, 0) -> lambda = (-1, 0)
  // z_1 > 0 needs lambda_1 = +1: gap 2; z_2 = 0 needs |lambda_2| <= 1: ok
  EXPECT_NEAR(kkt_residual(inst, vec({0.5, 0}), vec({0.5, 0}), vec({-1, 0})), 2.0, 1e-15);
}

TEST(SolveOracle, Dispatch) {
  RngStream rng(58);
  const auto inst = random_quadratic_instance(3, 3, rng);
  OracleConfig cfg;
  cfg.method = OracleMethod::ExactKkt;
  EXPECT_EQ(solve_oracle(inst, cfg).iterations, 0);
  cfg.method = OracleMethod::StaticAdmm;
  EXPECT_GT(solve_oracle(inst, cfg).iterations, 0);
}
