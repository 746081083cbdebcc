#pragma once

// Random problem instances shared by the solver tests and the acceptance
// suite.

#include <cstdint>
#include <limits>
#include <random>

#include "adapt/solver.hpp"
#include "oracles.hpp"

namespace instance {

using namespace adapt;

struct Constrained {
  UncertaintySet set;
  CoefficientVector anchor;
  Matrix hess;
};

// Three (or `width`) columns scattered around a true model, an anchor off
// the bank, and tau halfway between the smallest attainable held-out loss
// and the loss of the unconstrained minimizer, so the constraint binds.
inline Constrained constrained(std::uint64_t seed, Index width = 3, Index n = 200, Index p = 4) {
  std::mt19937_64 rng(seed);
  const auto inst = oracle::random_logistic(seed * 7919 + 1, n, p, 1.0);
  Constrained c;
  c.set.eval_data = inst.data;
  c.set.link = Link::logistic;
  for (Index k = 0; k < width; ++k) {
    c.set.bank.columns.push_back(oracle::perturbed(rng, inst.truth, 0.8));
    c.set.bank.labels.push_back(static_cast<int>(k + 1));
  }
  c.anchor = oracle::perturbed(rng, inst.truth, 1.0);
  c.hess = hessian(c.anchor, inst.data, Link::logistic);

  c.set.tau = std::numeric_limits<double>::infinity();
  const double free_loss = c.set.loss(adapt_estimate(c.set, c.anchor, c.hess).weights);
  const double best_loss = c.set.loss(best_source_combination(c.set.bank, inst.data, Link::logistic).first);
  c.set.tau = best_loss + 0.5 * (free_loss - best_loss);
  return c;
}

// Bank [target, source, source] with the target column as anchor, the
// Hessian at the anchor, and tau from the midpoint rule. The anchor is
// infeasible on roughly two thirds of the seeds.
inline Constrained anchored(std::uint64_t seed, Index n = 200, Index p = 4) {
  std::mt19937_64 rng(seed);
  const auto inst = oracle::random_logistic(seed * 7919 + 1, n, p, 1.0);
  Constrained c;
  c.set.eval_data = inst.data;
  c.set.link = Link::logistic;
  for (int k = 0; k < 3; ++k) {
    c.set.bank.columns.push_back(oracle::perturbed(rng, inst.truth, 0.8));
    c.set.bank.labels.push_back(k);
  }
  c.anchor = c.set.bank.columns[0];
  c.hess = hessian(c.anchor, inst.data, Link::logistic);
  const ModelBank sources{{c.set.bank.columns[1], c.set.bank.columns[2]}, {1, 2}};
  const auto tilde = best_source_combination(sources, inst.data, Link::logistic).second;
  c.set.tau = select_tau(c.anchor, tilde, inst.data, Link::logistic);
  return c;
}

inline bool anchor_infeasible(const Constrained& c) {
  return negative_log_likelihood(c.anchor, c.set.eval_data, c.set.link) > c.set.tau;
}

struct GridComparison {
  double ours = 0.0;
  double coarse = 0.0;   // best feasible point of the 0.005 grid
  double refined = 0.0;  // coarse optimum refined at spacing 1e-4
  int feasible_points = 0;
};

// Brute-force comparison of a three-column solve against the barycentric
// grid. Objective and feasibility are evaluated independently of the solver.
inline GridComparison compare_with_grid(const Constrained& c, const Vector& gamma) {
  const Matrix b = c.set.bank.matrix();
  const Vector a = c.anchor.stacked();
  const Matrix xb = oracle::augmented(c.set.eval_data.features) * b;
  auto objective = [&](const Vector& g) { return oracle::anchored_quadratic(b, a, c.hess, g); };
  auto feasible = [&](const Vector& g) {
    return oracle::logistic_nll_eta(xb * g, c.set.eval_data.outcomes) <= c.set.tau;
  };
  GridComparison out;
  out.ours = objective(gamma);
  const auto coarse = oracle::barycentric_grid(200, objective, feasible);
  out.coarse = coarse.objective;
  out.feasible_points = coarse.feasible;
  out.refined = coarse.objective;
  if (coarse.feasible > 0) {
    const auto fine = oracle::barycentric_window(coarse.gamma, 0.01, 1e-4, objective, feasible);
    out.refined = std::min(out.refined, fine.objective);
  }
  return out;
}

}  // namespace instance
