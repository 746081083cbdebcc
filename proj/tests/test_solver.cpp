#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "adapt/solver.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace adapt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CoefficientVector cv(double b0, std::initializer_list<double> s) {
  CoefficientVector b(static_cast<Index>(s.size()));
  b.intercept = b0;
  Index j = 0;
  for (double v : s) b.slopes[j++] = v;
  return b;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index j = 0;
  for (double e : v) out[j++] = e;
  return out;
}

}  // namespace

TEST(Combine, VertexReturnsColumn) {
  ModelBank bank{{cv(1, {2, 3}), cv(-1, {0, 5})}, {}};
  EXPECT_EQ(combine(bank, SimplexWeights::vertex(2, 0)), bank.columns[0]);
  EXPECT_EQ(combine(bank, SimplexWeights::vertex(2, 1)), bank.columns[1]);
}

TEST(Combine, IdenticalColumns) {
  ModelBank bank{{cv(0.5, {1, -1}), cv(0.5, {1, -1}), cv(0.5, {1, -1})}, {}};
  const auto b = combine(bank, {vec({0.2, 0.3, 0.5})});
  EXPECT_NEAR(b.intercept, 0.5, 1e-15);
  EXPECT_NEAR(b.slopes[0], 1.0, 1e-15);
  EXPECT_NEAR(b.slopes[1], -1.0, 1e-15);
}

TEST(Combine, TwoColumns) {
  ModelBank bank{{cv(1, {4}), cv(3, {8})}, {}};
  const auto b = combine(bank, {vec({0.25, 0.75})});
  EXPECT_DOUBLE_EQ(b.intercept, 2.5);
  EXPECT_DOUBLE_EQ(b.slopes[0], 7.0);
}

TEST(Combine, DimensionMismatch) {
  ModelBank bank{{cv(1, {4}), cv(3, {8})}, {}};
  EXPECT_THROW(combine(bank, SimplexWeights::uniform(3)), DimensionError);
  ModelBank ragged{{cv(1, {4}), cv(3, {8, 1})}, {}};
  EXPECT_THROW(combine(ragged, SimplexWeights::uniform(2)), DimensionError);
  EXPECT_THROW(combine(ModelBank{}, SimplexWeights::uniform(1)), InvalidArgument);
}

TEST(BestSourceCombination, SingleSource) {
  const auto inst = oracle::random_logistic(1, 100, 3);
  ModelBank bank{{inst.truth}, {1}};
  const auto [w, beta] = best_source_combination(bank, inst.data, Link::logistic);
  EXPECT_EQ(w.gamma, vec({1.0}));
  EXPECT_EQ(beta, inst.truth);
}

TEST(BestSourceCombination, MatchesLineSearchOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = oracle::random_logistic(500 + trial, 150, 4, 1.0);
    ModelBank bank{{oracle::perturbed(rng, inst.truth, 1.0), oracle::perturbed(rng, inst.truth, 1.0)},
                   {1, 2}};
    const Matrix b = bank.matrix();
    double oracle_best = kInf;
    for (int i = 0; i <= 1000; ++i) {
      const double g = i / 1000.0;
      oracle_best = std::min(oracle_best, oracle::logistic_nll(oracle::mix(b, vec({g, 1 - g})), inst.data));
    }
    const auto [w, beta] = best_source_combination(bank, inst.data, Link::logistic);
    EXPECT_TRUE(w.valid());
    const double ours = oracle::logistic_nll(beta, inst.data);
    EXPECT_LE(ours, oracle_best + 1e-12);
    EXPECT_NEAR(ours, oracle_best, 1e-5);
  }
}

TEST(BestSourceCombination, DuplicatedColumns) {
  std::mt19937_64 rng(4);
  const auto inst = oracle::random_logistic(77, 150, 3, 1.0);
  const auto col = oracle::perturbed(rng, inst.truth, 0.5);
  const auto other = oracle::perturbed(rng, inst.truth, 0.5);
  ModelBank single{{col, other}, {1, 2}};
  ModelBank doubled{{col, col, other}, {1, 1, 2}};
  const auto [w1, b1] = best_source_combination(single, inst.data, Link::logistic);
  const auto [w2, b2] = best_source_combination(doubled, inst.data, Link::logistic);
  EXPECT_NEAR(negative_log_likelihood(b1, inst.data, Link::logistic),
              negative_log_likelihood(b2, inst.data, Link::logistic), 1e-10);
  // Symmetric start and updates split the duplicated weight evenly.
  EXPECT_NEAR(w2.gamma[0], w2.gamma[1], 1e-12);
  const auto [w3, b3] = best_source_combination(doubled, inst.data, Link::logistic);
  EXPECT_EQ(w2.gamma, w3.gamma);
}

TEST(BestSourceCombination, EmptyBank) {
  const auto inst = oracle::random_logistic(2, 20, 2);
  EXPECT_THROW(best_source_combination(ModelBank{}, inst.data, Link::logistic), InvalidArgument);
}

TEST(SelectTau, MeanOfTheTwoLosses) {
  // Identity link, one sample with y = 0 and no slope: loss = b0^2 / 2.
  Dataset d;
  d.features = Matrix::Zero(1, 1);
  d.outcomes = Vector::Zero(1);
  const auto a = cv(std::sqrt(1.2), {0});
  const auto b = cv(std::sqrt(1.6), {0});
  EXPECT_NEAR(select_tau(a, b, d, Link::identity), 0.7, 1e-15);
  EXPECT_NEAR(select_tau(a, a, d, Link::identity), 0.6, 1e-15);
}

TEST(SelectTau, AtLeastTheSmallerLoss) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = oracle::random_logistic(40 + trial, 80, 3);
    const auto a = oracle::random_coefficients(rng, 3);
    const auto b = oracle::random_coefficients(rng, 3);
    const double tau = select_tau(a, b, inst.data, Link::logistic);
    EXPECT_GE(tau, std::min(negative_log_likelihood(a, inst.data, Link::logistic),
                            negative_log_likelihood(b, inst.data, Link::logistic)));
  }
}

TEST(AdaptEstimate, FeasibleAnchorIsReturnedExactly) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto c = instance::constrained(seed);
    c.anchor = c.set.bank.columns[0];
    c.set.tau = c.set.loss(SimplexWeights::vertex(3, 0)) + 0.01;
    const auto r = adapt_estimate(c.set, c.anchor, c.hess);
    EXPECT_EQ(r.beta, c.anchor);
    EXPECT_EQ(r.weights.gamma, SimplexWeights::vertex(3, 0).gamma);
    EXPECT_EQ(r.diagnostics.objective, 0.0);
  }
}

TEST(AdaptEstimate, MatchesBarycentricGridOracle) {
  int checked = 0;
  for (std::uint64_t seed = 1; checked < 20; ++seed) {
    const auto c = instance::anchored(seed);
    if (!instance::anchor_infeasible(c)) continue;
    ++checked;
    const auto r = adapt_estimate(c.set, c.anchor, c.hess);
    const auto g = instance::compare_with_grid(c, r.weights.gamma);
    ASSERT_GT(g.feasible_points, 0);
    EXPECT_NEAR(g.ours, r.diagnostics.objective, 1e-10);
    // Grid points are feasible, so the solve can only be lower; the coarse
    // grid itself is off by more than 1e-4 near a curved constraint.
    EXPECT_LE(g.ours, g.coarse + 1e-4) << "seed " << seed;
    EXPECT_NEAR(g.ours, g.refined, 1e-4) << "seed " << seed;
    EXPECT_LE(oracle::logistic_nll(r.beta, c.set.eval_data), c.set.tau + 1e-6);
  }
}

TEST(AdaptEstimate, OffBankAnchorMatchesGridOracle) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto c = instance::constrained(seed);
    const auto r = adapt_estimate(c.set, c.anchor, c.hess);
    const auto g = instance::compare_with_grid(c, r.weights.gamma);
    EXPECT_LE(g.ours, g.coarse + 1e-12) << "seed " << seed;
    EXPECT_NEAR(g.ours, g.refined, 1e-4) << "seed " << seed;
  }
}

TEST(AdaptEstimate, AnchorAbsorptionUnderTauRule) {
  int checked = 0;
  for (std::uint64_t seed = 1; checked < 10; ++seed) {
    const auto c = instance::anchored(seed);
    if (instance::anchor_infeasible(c)) continue;
    ++checked;
    const auto r = adapt_estimate(c.set, c.anchor, c.hess);
    EXPECT_EQ(r.beta, c.anchor);
    EXPECT_EQ(r.diagnostics.objective, 0.0);
  }
}

TEST(AdaptEstimate, KktAndComplementarySlackness) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto c = instance::constrained(seed);
    const auto r = adapt_estimate(c.set, c.anchor, c.hess);
    const auto& d = r.diagnostics;
    EXPECT_TRUE(d.converged) << d.termination;
    EXPECT_TRUE(r.weights.valid());
    EXPECT_TRUE(d.constraint_active);
    EXPECT_GE(d.slack, 0.0);
    EXPECT_LE(d.slack, 1e-6);
    EXPECT_LE(d.kkt_residual, 1e-6);
    EXPECT_LE(d.complementary_slackness, 1e-8);
  }
}

TEST(AdaptEstimate, ObjectiveNonincreasingInTau) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto c = instance::constrained(seed);
    const double base = c.set.tau;
    double previous = kInf;
    for (double shift : {-0.004, -0.002, 0.0, 0.002, 0.004, 0.05}) {
      c.set.tau = base + shift;
      const double obj = adapt_estimate(c.set, c.anchor, c.hess).diagnostics.objective;
      EXPECT_LE(obj, previous + 1e-9);
      previous = obj;
    }
  }
}

TEST(AdaptEstimate, DominatesFeasibleVertices) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto c = instance::constrained(seed);
    const Matrix b = c.set.bank.matrix();
    const Vector a = c.anchor.stacked();
    const auto r = adapt_estimate(c.set, c.anchor, c.hess);
    for (Index k = 0; k < 3; ++k) {
      const auto e = SimplexWeights::vertex(3, k);
      if (!c.set.contains(e)) continue;
      EXPECT_LE(r.diagnostics.objective, oracle::anchored_quadratic(b, a, c.hess, e.gamma) + 1e-12);
    }
    const auto best = best_source_combination(c.set.bank, c.set.eval_data, c.set.link).first;
    EXPECT_LE(r.diagnostics.objective, oracle::anchored_quadratic(b, a, c.hess, best.gamma) + 1e-12);
  }
}

TEST(AdaptEstimate, EmptySetIsReported) {
  auto c = instance::constrained(3);
  const auto best = best_source_combination(c.set.bank, c.set.eval_data, c.set.link).first;
  c.set.tau = c.set.loss(best) - 0.01;
  EXPECT_THROW(adapt_estimate(c.set, c.anchor, c.hess), SolverError);
}

TEST(AdaptEstimate, RejectsBadInputs) {
  auto c = instance::constrained(4);
  EXPECT_THROW(adapt_estimate(c.set, c.anchor, Matrix::Identity(3, 3)), DimensionError);
  EXPECT_THROW(adapt_estimate(c.set, CoefficientVector(2), c.hess), DimensionError);
  c.set.tau = -1.0;
  EXPECT_THROW(adapt_estimate(c.set, c.anchor, c.hess), InvalidArgument);
}

TEST(Maximin, SingleSource) {
  ModelBank bank{{cv(1, {2, -1})}, {1}};
  const auto [beta, w] = maximin_estimate(bank, Matrix::Identity(3, 3));
  EXPECT_EQ(beta, bank.columns[0]);
  EXPECT_EQ(w.gamma, vec({1.0}));
}

TEST(Maximin, OrthogonalColumnsClosedForm) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double s1 = u(rng);
    const double s2 = u(rng);
    ModelBank bank{{cv(s1, {0, s1}), cv(0, {s2, 0})}, {1, 2}};
    const double n1 = 2 * s1 * s1;
    const double n2 = s2 * s2;
    const auto [beta, w] = maximin_estimate(bank, Matrix::Identity(3, 3));
    EXPECT_NEAR(w.gamma[0], n2 / (n1 + n2), 1e-8);
  }
}

TEST(Maximin, ZeroColumnGivesNullModel) {
  std::mt19937_64 rng(6);
  const auto inst = oracle::random_logistic(6, 100, 3);
  ModelBank bank{{oracle::random_coefficients(rng, 3), CoefficientVector(3), oracle::random_coefficients(rng, 3)},
                 {1, 2, 3}};
  const Matrix h = hessian(CoefficientVector(3), inst.data, Link::logistic);
  const auto [beta, w] = maximin_estimate(bank, h);
  EXPECT_EQ(beta, CoefficientVector(3));
  EXPECT_EQ(w.gamma, SimplexWeights::vertex(3, 1).gamma);
}

TEST(Maximin, EqualsUnconstrainedZeroAnchorAdapt) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto c = instance::constrained(seed);
    const Matrix h = hessian(CoefficientVector(c.set.bank.dim()), c.set.eval_data, Link::logistic);
    const auto [beta, w] = maximin_estimate(c.set.bank, h);
    c.set.tau = kInf;
    const auto r = adapt_estimate(c.set, CoefficientVector(c.set.bank.dim()), h);
    EXPECT_LE((r.beta.stacked() - beta.stacked()).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(Maximin, MatchesGridOracle) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto c = instance::constrained(seed);
    const Matrix h = hessian(CoefficientVector(c.set.bank.dim()), c.set.eval_data, Link::logistic);
    const Matrix b = c.set.bank.matrix();
    const Vector zero = Vector::Zero(b.rows());
    const auto grid = oracle::barycentric_grid(
        200, [&](const Vector& g) { return oracle::anchored_quadratic(b, zero, h, g); },
        [](const Vector&) { return true; });
    const auto [beta, w] = maximin_estimate(c.set.bank, h);
    EXPECT_LE(oracle::anchored_quadratic(b, zero, h, w.gamma), grid.objective + 1e-12);
  }
}
