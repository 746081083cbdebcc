#include <gtest/gtest.h>

#include <random>

#include "adapt/simplex.hpp"

using adapt::minimize_on_simplex;
using adapt::project_to_simplex;
using adapt::simplex_kkt_residual;
using Eigen::VectorXd;

TEST(SimplexProjection, PointsOnTheSimplexAreFixed) {
  VectorXd v(4);
  v << 0.1, 0.2, 0.3, 0.4;
  EXPECT_LE((project_to_simplex(v) - v).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SimplexProjection, KnownValues) {
  VectorXd v(3);
  v << 2.0, 0.0, 0.0;
  EXPECT_EQ(project_to_simplex(v), VectorXd::Unit(3, 0));
  v << 0.5, 0.5, -3.0;
  const VectorXd x = project_to_simplex(v);
  EXPECT_DOUBLE_EQ(x[0], 0.5);
  EXPECT_DOUBLE_EQ(x[1], 0.5);
  EXPECT_EQ(x[2], 0.0);
  v << 1.0, 1.0, 1.0;
  EXPECT_LE((project_to_simplex(v).array() - 1.0 / 3).abs().maxCoeff(), 1e-15);
}

TEST(SimplexProjection, IsTheClosestPointOnRandomInputs) {
  // Variational inequality: (v - x)'(y - x) <= 0 for all simplex points y,
  // checked on the vertices.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    VectorXd v(6);
    for (auto& e : v) e = z(rng);
    const VectorXd x = project_to_simplex(v);
    EXPECT_GE(x.minCoeff(), 0.0);
    EXPECT_NEAR(x.sum(), 1.0, 1e-12);
    for (int k = 0; k < 6; ++k) EXPECT_LE((v - x).dot(VectorXd::Unit(6, k) - x), 1e-12);
  }
}

TEST(SimplexProjection, RejectsEmpty) {
  EXPECT_THROW(project_to_simplex(VectorXd()), adapt::DimensionError);
}

TEST(ProjectedGradient, MinimizesDistanceToAnExteriorPoint) {
  // min |x - c|^2 over the simplex is the projection of c.
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd c(5);
    for (auto& e : c) e = z(rng);
    auto f = [&](const VectorXd& x, VectorXd& g) {
      g = 2.0 * (x - c);
      return (x - c).squaredNorm();
    };
    const auto r = minimize_on_simplex(f, VectorXd::Constant(5, 0.2));
    EXPECT_TRUE(r.converged);
    EXPECT_LE((r.x - project_to_simplex(c)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT(simplex_kkt_residual(r.x, r.grad), 1e-10);
  }
}

TEST(ProjectedGradient, IllConditionedQuadratic) {
  Eigen::MatrixXd q(3, 3);
  q << 1e2, 0, 0, 0, 1, 0, 0, 0, 1e-2;
  auto f = [&](const VectorXd& x, VectorXd& g) {
    g = 2.0 * q * x;
    return x.dot(q * x);
  };
  const auto r = minimize_on_simplex(f, VectorXd::Constant(3, 1.0 / 3));
  EXPECT_TRUE(r.converged);
  // Interior optimum is proportional to the inverse diagonal.
  VectorXd expected(3);
  expected << 1e-2, 1.0, 100.0;
  expected /= expected.sum();
  EXPECT_LE((r.x - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ProjectedGradient, SingleCoordinateIsImmediate) {
  auto f = [](const VectorXd& x, VectorXd& g) {
    g = x;
    return 0.5 * x.squaredNorm();
  };
  const auto r = minimize_on_simplex(f, VectorXd::Constant(1, 7.0));
  EXPECT_EQ(r.x[0], 1.0);
  EXPECT_EQ(r.iterations, 0);
}
