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

ProblemInstance scalar_quadratic() {
  return ProblemInstance(0, QuadraticForm{scalar(1), vec({0})}, QuadraticForm{scalar(1), vec({0})}, scalar(1),
                         scalar(-1), vec({0}));
}

ProblemInstance scalar_lasso(double F, double h, double gamma) {
  return ProblemInstance(0, LeastSquares{scalar(F), vec({h})}, ScaledL1{gamma, 1}, scalar(1), scalar(-1), vec({0}));
}

}  // namespace

TEST(SoftThreshold, ThreeBranches) {
  const Vector out = soft_threshold(vec({2.0, 0.5, -2.0, 1.0, -1.0}), 1.0);
  EXPECT_DOUBLE_EQ(out(0), 1.0);
  EXPECT_DOUBLE_EQ(out(1), 0.0);
  EXPECT_DOUBLE_EQ(out(2), -1.0);
  EXPECT_DOUBLE_EQ(out(3), 0.0);
  EXPECT_DOUBLE_EQ(out(4), 0.0);
  EXPECT_THROW(soft_threshold(vec({1.0}), 0.0), DomainError);
}

TEST(XUpdate, ScalarCases) {
  const auto inst = scalar_quadratic();
  AdmmState s{vec({0}), vec({3}), vec({0}), 0};
  EXPECT_NEAR(x_update(s, inst, 2.0)(0), 1.5, 1e-15);
  s.lambda = vec({2});
  EXPECT_NEAR(x_update(s, inst, 2.0)(0), 1.0, 1e-15);
  EXPECT_THROW(x_update(s, inst, 0.0), DomainError);
  EXPECT_THROW(x_update(AdmmState::zeros(2, 1), inst, 1.0), StructuralError);
}

TEST(XUpdate, MatchesGradientDescentOracle) {
  RngStream rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = random_quadratic_instance(4, 3, rng, trial % 2 == 1);
    const AdmmState s{random_vector(4, rng), random_vector(3, rng), random_vector(3, rng), 0};
    const double rho = rng.uniform(0.2, 3.0);
    // subproblem: f(x) + lambda^T A x + rho/2 ||A x + B z - c||^2
    const auto& f = std::get<QuadraticForm>(inst.f());
    const Matrix& A = inst.A();
    const Matrix H = 2.0 * f.phi + rho * A.transpose() * A;
    const Vector r = 2.0 * f.phi * f.theta - A.transpose() * s.lambda - rho * A.transpose() * (inst.B() * s.z - inst.c());
    EXPECT_LT((x_update(s, inst, rho) - gradient_descent_quadratic(H, r)).norm(), 1e-8);
  }
}

TEST(XUpdate, RejectsNonsmoothF) {
  const auto inst = ProblemInstance(0, ScaledL1{1.0, 1}, ScaledL1{1.0, 1}, scalar(1), scalar(-1), vec({0}));
  EXPECT_THROW(x_update(AdmmState::zeros(1, 1), inst, 1.0), UnsupportedError);
}

TEST(ZUpdate, SoftThresholdCase) {
  const auto inst = ProblemInstance(0, QuadraticForm{Matrix::Identity(2, 2), Vector::Zero(2)}, ScaledL1{1.0, 2},
                                    Matrix::Identity(2, 2), -Matrix::Identity(2, 2), Vector::Zero(2));
  const Vector z = z_update(AdmmState::zeros(2, 2), inst, 1.0, vec({2.0, 0.5}));
  EXPECT_DOUBLE_EQ(z(0), 1.0);
  EXPECT_DOUBLE_EQ(z(1), 0.0);
}

TEST(ZUpdate, QuadraticScalarCase) {
  // 2z + 2(z - 2) = 0
  EXPECT_NEAR(z_update(AdmmState::zeros(1, 1), scalar_quadratic(), 2.0, vec({2.0}))(0), 1.0, 1e-15);
}

TEST(ZUpdate, SubgradientOptimalityOnRandomL1) {
  RngStream rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index M = 6;
    const double gamma = rng.uniform(0.1, 2.0), rho = rng.uniform(0.1, 3.0);
    const auto inst = ProblemInstance(0, QuadraticForm{random_spd(M, rng), random_vector(M, rng)},
                                      ScaledL1{gamma, M}, random_matrix(M, M, rng), -Matrix::Identity(M, M),
                                      Vector::Zero(M));
    const AdmmState s{random_vector(M, rng), random_vector(M, rng), random_vector(M, rng, 2.0), 0};
    const Vector x = random_vector(M, rng, 2.0);
    const Vector z = z_update(s, inst, rho, x);
    // 0 in gamma d|z| - lambda - rho (A x - z), checked coordinatewise
    const Vector w = s.lambda + rho * (inst.A() * x - z);
    for (Eigen::Index i = 0; i < M; ++i) {
      if (z(i) == 0.0) {
        EXPECT_LE(std::abs(w(i)), gamma + 1e-8);
      } else {
        EXPECT_NEAR(w(i), gamma * (z(i) > 0 ? 1.0 : -1.0), 1e-8);
      }
    }
    EXPECT_LE(z_subproblem_violation(s, inst, rho, x, z), 1e-8);
  }
}

TEST(ZUpdate, L1NeedsNegativeIdentityCoupling) {
  const auto inst = ProblemInstance(0, QuadraticForm{scalar(1), vec({0})}, ScaledL1{1.0, 1}, scalar(1), scalar(-2),
                                    vec({0}));
  EXPECT_THROW(z_update(AdmmState::zeros(1, 1), inst, 1.0, vec({1.0})), UnsupportedError);
}

TEST(DualUpdate, Cases) {
  const auto inst = ProblemInstance(0, QuadraticForm{Matrix::Identity(2, 2), Vector::Zero(2)}, ScaledL1{1.0, 2},
                                    Matrix::Identity(2, 2), -Matrix::Identity(2, 2), Vector::Zero(2));
  const Vector l = dual_update(AdmmState::zeros(2, 2), inst, 2.0, vec({1, 0}), vec({0, 0}));
  EXPECT_DOUBLE_EQ(l(0), 2.0);
  EXPECT_DOUBLE_EQ(l(1), 0.0);
  AdmmState s = AdmmState::zeros(2, 2);
  s.lambda = vec({0.3, -0.7});
  EXPECT_EQ(dual_update(s, inst, 2.0, vec({1, 5}), vec({1, 5})), s.lambda);
}

TEST(DualUpdate, IdentityOnRandomInputs) {
  RngStream rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_quadratic_instance(3, 4, rng, true);
    const AdmmState s{random_vector(3, rng), random_vector(4, rng), random_vector(4, rng), 0};
    const Vector x = random_vector(3, rng), z = random_vector(4, rng);
    const double rho = rng.uniform(0.1, 4.0);
    Vector expect = s.lambda;
    for (Eigen::Index i = 0; i < 4; ++i) {
      double r = -inst.c()(i);
      for (Eigen::Index j = 0; j < 3; ++j) r += inst.A()(i, j) * x(j);
      for (Eigen::Index j = 0; j < 4; ++j) r += inst.B()(i, j) * z(j);
      expect(i) += rho * r;
    }
    EXPECT_LT((dual_update(s, inst, rho, x, z) - expect).lpNorm<Eigen::Infinity>(), 1e-13);
  }
}

TEST(Step, FixedPointAtOrigin) {
  const AdmmState s = step(AdmmState::zeros(1, 1), scalar_quadratic(), {2.0, SolverMode::Dynamic});
  EXPECT_EQ(s.x(0), 0.0);
  EXPECT_EQ(s.z(0), 0.0);
  EXPECT_EQ(s.lambda(0), 0.0);
  EXPECT_EQ(s.k, 1);
}

TEST(Step, ScalarLassoFromZeros) {
  const AdmmState s = step(AdmmState::zeros(1, 1), scalar_lasso(1.0, 2.0, 0.2), {1.0, SolverMode::Dynamic});
  EXPECT_NEAR(s.x(0), 1.0, 1e-15);
  EXPECT_NEAR(s.z(0), 0.8, 1e-15);
  EXPECT_NEAR(s.lambda(0), 0.2, 1e-15);
}

TEST(Step, ResumingFromRecordedStateIsIdentical) {
  RngStream rng(34);
  QuadFamilyConfig cfg;
  cfg.steps = 10;
  const auto stream = quad_family_stream(cfg, rng);
  const SolverConfig sc{1.3, SolverMode::Dynamic};
  const auto states = run_dynamic(stream, sc);
  AdmmState resumed = states[4];
  for (std::size_t i = 5; i < stream.size(); ++i) {
    resumed = step(resumed, stream[i], sc);
    EXPECT_EQ(resumed, states[i]);
  }
}

TEST(RunDynamic, EmptyStreamAndModeCheck) {
  EXPECT_TRUE(run_dynamic(std::span<const ProblemInstance>(), {}).empty());
  const std::vector<ProblemInstance> one{scalar_quadratic()};
  EXPECT_THROW(run_dynamic(one, {1.0, SolverMode::Static}), DomainError);
  EXPECT_THROW(run_dynamic(one, {-1.0, SolverMode::Dynamic}), DomainError);
}

TEST(RunDynamic, ShapeChangeReportsIndex) {
  std::vector<ProblemInstance> stream{scalar_quadratic(), scalar_quadratic(),
                                      ProblemInstance(2, QuadraticForm{Matrix::Identity(2, 2), Vector::Zero(2)},
                                                      QuadraticForm{scalar(1), vec({0})}, Matrix::Ones(1, 2),
                                                      scalar(-1), vec({0}))};
  try {
    run_dynamic(stream, {});
    FAIL() << "expected StructuralError";
  } catch (const StructuralError& e) {
    EXPECT_NE(std::string(e.what()).find("instance 2"), std::string::npos);
  }
}

TEST(RunDynamic, ConstantStreamEqualsStaticIterations) {
  RngStream rng(35);
  const auto inst = random_quadratic_instance(4, 3, rng, true);
  const std::vector<ProblemInstance> stream(25, inst);
  const auto states = run_dynamic(stream, {0.8, SolverMode::Dynamic});
  const StaticAdmm admm(inst, 0.8);
  AdmmState s = AdmmState::zeros(4, 3);
  for (std::size_t i = 0; i < stream.size(); ++i) {
    s = admm.step(s);
    EXPECT_LT((s.x - states[i].x).norm(), 1e-12);
    EXPECT_LT((s.z - states[i].z).norm(), 1e-12);
    EXPECT_LT((s.lambda - states[i].lambda).norm(), 1e-12);
  }
}

TEST(RunDynamic, SubproblemOptimalityAndGradientRelationEveryStep) {
  RngStream rng(36);
  QuadFamilyConfig cfg;
  cfg.steps = 200;
  cfg.general_b = true;
  const auto stream = quad_family_stream(cfg, rng);
  const double rho = 0.7;
  const auto states = run_dynamic(stream, {rho, SolverMode::Dynamic});
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const AdmmState prev = i == 0 ? AdmmState::zeros(stream[i].N(), stream[i].M()) : states[i - 1];
    EXPECT_LT(x_subproblem_gradient(prev, stream[i], rho, states[i].x).lpNorm<Eigen::Infinity>(), 1e-8);
    EXPECT_LT(z_subproblem_violation(prev, stream[i], rho, states[i].x, states[i].z), 1e-8);
    // z stationarity plus the dual update: grad g(z_k) + B^T lambda_k = 0
    const Vector rel = gradient(stream[i].g(), states[i].z) + stream[i].B().transpose() * states[i].lambda;
    EXPECT_LT(rel.lpNorm<Eigen::Infinity>(), 1e-8) << "k = " << i + 1;
    EXPECT_LT((states[i].lambda - prev.lambda - rho * constraint_residual(stream[i], states[i].x, states[i].z))
                  .lpNorm<Eigen::Infinity>(),
              1e-13);
  }
}

TEST(RunDynamic, BitIdenticalReruns) {
  auto make = [] {
    RngStream rng(37);
    return quad_family_stream(QuadFamilyConfig{}, rng);
  };
  const auto a = run_dynamic(make(), {});
  const auto b = run_dynamic(make(), {});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i], b[i]);
}
