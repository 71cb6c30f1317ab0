#include <gtest/gtest.h>

#include "fitsink/sk_solver.hpp"
#include "support/expect_error.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace fitsink;
using namespace fitsink::test;

namespace {

ScalingProblem mstar_problem() { return ScalingProblem::from_bipartite(mstar()); }

double inf_norm(const Eigen::MatrixXd& m) { return m.lpNorm<Eigen::Infinity>(); }

std::vector<SKOptions> all_modes() {
  std::vector<SKOptions> out;
  for (bool log_domain : {false, true}) {
    for (auto schedule : {Schedule::gauss_seidel, Schedule::jacobi}) {
      SKOptions o;
      o.log_domain = log_domain;
      o.schedule = schedule;
      out.push_back(o);
    }
  }
  return out;
}

}  // namespace

TEST(SkStep, FixedPointOfMStar) {
  const auto [u, v] = sk_step(mstar_problem(), kUStar, kVStar);
  EXPECT_EQ(u, kUStar);
  EXPECT_EQ(v, kVStar);
}

TEST(SkStep, AllOnesTwoByTwo) {
  const ScalingProblem p(Eigen::MatrixXd::Ones(2, 2), Eigen::Vector2d::Ones(), Eigen::Vector2d::Ones());
  const auto [u, v] = sk_step(p, Eigen::Vector2d::Ones(), Eigen::Vector2d::Ones());
  EXPECT_EQ(u, Eigen::Vector2d(0.5, 0.5));
  EXPECT_EQ(v, Eigen::Vector2d::Ones());
  EXPECT_EQ(scaled_matrix(p, u, v).matrix, Eigen::Matrix2d::Constant(0.5));
  const auto [u2, v2] = sk_step(p, u, v);
  EXPECT_EQ(u2, u);
  EXPECT_EQ(v2, v);
}

TEST(SkStep, Errors) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 1, 0, 0;
  const ScalingProblem p(a, Eigen::Vector2d::Ones(), Eigen::Vector2d::Ones());
  EXPECT_FITSINK_ERROR(sk_step(p, Eigen::Vector2d::Ones(), Eigen::Vector2d::Ones()),
                       ErrorCode::DivisionByZero);
  EXPECT_FITSINK_ERROR(sk_solve(p), ErrorCode::DivisionByZero);
  EXPECT_FITSINK_ERROR(sk_step(mstar_problem(), Eigen::Vector3d(1, 0, 1), Eigen::Vector3d::Ones()),
                       ErrorCode::NonPositiveInput);
  EXPECT_FITSINK_ERROR(sk_step(mstar_problem(), Eigen::Vector2d::Ones(), Eigen::Vector3d::Ones()),
                       ErrorCode::DimensionMismatch);
  SKOptions bad;
  bad.tolerance = 0.0;
  EXPECT_FITSINK_ERROR(sk_solve(mstar_problem(), bad), ErrorCode::InvalidArgument);
}

TEST(SkSolve, MStarAllModes) {
  for (const auto& options : all_modes()) {
    const auto s = sk_solve(mstar_problem(), options);
    EXPECT_TRUE(s.converged);
    EXPECT_FALSE(s.total_support_suspect);
    EXPECT_LE(s.marginal_residual, options.tolerance);
    const double beta = s.u[2];
    EXPECT_LT(inf_norm(s.u / beta - kUStar), 1e-10);
    EXPECT_LT(inf_norm(s.v * beta - kVStar), 1e-10);
    EXPECT_LT(inf_norm(scaled_matrix(mstar_problem(), s.u, s.v).matrix - mstar_scaled()), 1e-10);
    EXPECT_LT(inf_norm(s.log_u - s.u.array().log().matrix()), 1e-14);
  }
}

TEST(SkSolve, IdentityPatternIsExact) {
  const ScalingProblem p(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d::Ones(),
                         Eigen::Vector2d::Ones());
  const auto s = sk_solve(p);
  EXPECT_TRUE(s.converged);
  EXPECT_EQ(scaled_matrix(p, s.u, s.v).matrix, Eigen::Matrix2d::Identity());
}

TEST(SkSolve, TriangularTwoByTwoDrifts) {
  const auto p = ScalingProblem::from_bipartite(degenerate_2x2());
  for (const auto& options : all_modes()) {
    const auto s = sk_solve(p, options);
    EXPECT_FALSE(s.converged);
    EXPECT_TRUE(s.total_support_suspect);
    EXPECT_LT(s.iterations, options.max_iterations);
    const auto b = scaled_matrix(p, s.u, s.v).matrix;
    EXPECT_LT(b(0, 0), 1e-2);
    EXPECT_NEAR(b(0, 1), 1.0, 1e-2);
    EXPECT_NEAR(b(1, 0), 1.0, 1e-2);
    EXPECT_LT(s.marginal_residual, 1e-2);
  }
}

TEST(ScaledMatrix, Examples) {
  const auto p = mstar_problem();
  const auto at_star = scaled_matrix(p, kUStar, kVStar);
  EXPECT_EQ(at_star.matrix, Eigen::MatrixXd(mstar_scaled()));
  EXPECT_LT(at_star.marginal_residual, 1e-12);
  const auto identity = scaled_matrix(p, Eigen::Vector3d::Ones(), Eigen::Vector3d::Ones());
  EXPECT_EQ(identity.matrix, p.matrix());
  const auto moved = scaled_matrix(p, 2 * kUStar, kVStar / 2);
  EXPECT_EQ(moved.matrix, at_star.matrix);
  EXPECT_EQ(moved.marginal_residual, at_star.marginal_residual);
}

TEST(ScaledMatrix, GaugeInvariant) {
  const auto p = random_positive_problem(4, 5, 3);
  const auto s = sk_solve(p);
  const auto base = scaled_matrix(p, s.u, s.v).matrix;
  for (double alpha : {1e-6, 1.0, 1e6}) {
    const auto b = scaled_matrix(p, alpha * s.u, s.v / alpha).matrix;
    EXPECT_LT(((b - base).array().abs() / base.array()).maxCoeff(), 1e-14);
  }
}

TEST(SkSolve, MatchesNewtonOracle) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Index n = seed % 2 == 0 ? 3 : 4;
    const auto p = random_positive_problem(n, n, seed * 31);
    const auto expected = oracle::newton_scaling(p.matrix(), p.row_targets(), p.col_targets());
    ASSERT_TRUE(expected.has_value());
    for (const auto& options : all_modes()) {
      const auto s = sk_solve(p, options);
      ASSERT_TRUE(s.converged);
      EXPECT_LT(inf_norm(scaled_matrix(p, s.u, s.v).matrix - expected->scaled), 1e-8);
    }
  }
}

TEST(SkSolve, MatchesMultiprecisionOnRandomBinary) {
  for (const auto& m : random_total_support(10, 55)) {
    const auto p = ScalingProblem::from_bipartite(m);
    const auto expected = oracle::sk_fixed_point(p.matrix(), p.row_targets(), p.col_targets(), 3000);
    const auto s = sk_solve(p);
    ASSERT_TRUE(s.converged);
    EXPECT_LT(inf_norm(scaled_matrix(p, s.u, s.v).matrix - expected.scaled), 1e-10);
  }
}

TEST(SkSolve, LinearAndLogDomainAgree) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto p = random_positive_problem(3 + seed % 4, 2 + seed % 5, seed, 1e-3, 1e3);
    SKOptions linear;
    SKOptions logd;
    logd.log_domain = true;
    const auto a = sk_solve(p, linear);
    const auto b = sk_solve(p, logd);
    ASSERT_TRUE(a.converged && b.converged);
    EXPECT_LT(inf_norm(scaled_matrix(p, a.u, a.v).matrix - scaled_matrix(p, b.u, b.v).matrix),
              1e-10);
  }
}

TEST(SkStep, ResidualNonIncreasingOnRandomFiveByFive) {
  for (const auto& m : random_total_support(40, 77, 5, 5)) {
    if (m.rows() != 5 || m.cols() != 5) continue;
    const auto p = ScalingProblem::from_bipartite(m);
    Eigen::VectorXd u = Eigen::VectorXd::Ones(5);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(5);
    std::tie(u, v) = sk_step(p, u, v);
    double previous = scaled_matrix(p, u, v).marginal_residual;
    for (int it = 0; it < 200 && previous > 1e-14; ++it) {
      std::tie(u, v) = sk_step(p, u, v);
      const double now = scaled_matrix(p, u, v).marginal_residual;
      ASSERT_LE(now, previous * (1 + 1e-12) + 1e-15) << m.entries() << "\niteration " << it;
      previous = now;
    }
  }
}
